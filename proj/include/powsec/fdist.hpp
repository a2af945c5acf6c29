#pragma once

namespace powsec::stats {

/// Regularized incomplete beta I_x(a, b), continued fraction evaluated with
/// the modified Lentz method; relative tolerance 1e-15.
double incomplete_beta(double a, double b, double x);

/// P(F <= f) for an F(d1, d2) variable.
double f_cdf(double f, double d1, double d2);
/// Upper tail P(F > f), computed directly to keep precision for tiny p.
double f_sf(double f, double d1, double d2);

}  // namespace powsec::stats
