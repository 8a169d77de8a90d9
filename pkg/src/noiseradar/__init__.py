"""Covariance-matrix statistics for noise-type radars.

Core modules:

* model          -- structured covariance, sample covariance, auxiliary sums
* specfun        -- special functions and quadrature
* estimators     -- closed-form parameter estimates and detector statistics
* distributions  -- exact/approximate estimator distributions and TVD
* detection      -- thresholds, ROC curves (exact, closed-form, Monte Carlo)
* simulator      -- reproducible Monte Carlo trials
* figures        -- numeric regeneration of the reference figure data
* service        -- FastAPI wrapper; cli -- thin client command line
"""

__version__ = "0.1.0"
