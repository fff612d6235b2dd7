"""p-adic numbers, truncated power series and the formal group of a CM model"""
from .number import PadicNumber, padic_log, teichmuller
from .series import PadicSeries, RationalSeries
from .formal import (CMCurveModel, doubling_series, dump_series, formal_duplication,
                     formal_group_log, formal_x_series, half_period_values, log_theta_hat,
                     sigma_series, theta_hat_series, verify_padic_distribution,
                     weierstrass_p_laurent)
