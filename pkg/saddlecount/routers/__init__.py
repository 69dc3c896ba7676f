from saddlecount.routers import (
    count,
    enumeration,
    exponents,
    fit,
    integrability,
    plot,
    sandwich,
    scan,
    svconst,
    validate,
)

ROUTERS = (
    validate.router,
    enumeration.router,
    count.router,
    scan.router,
    fit.router,
    sandwich.router,
    svconst.router,
    integrability.router,
    exponents.router,
    plot.router,
)
