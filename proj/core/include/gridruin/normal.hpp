#pragma once

namespace gridruin::normal {

// Standard normal density.
double pdf(double x) noexcept;
// Distribution function, computed through erfc so that cdf(x) + sf(x) == 1
// holds to 1e-14 on |x| <= 8 and the far tails keep full relative accuracy.
double cdf(double x) noexcept;
// Upper tail 1 - cdf(x).
double sf(double x) noexcept;
// log(sf(x)); finite for all finite x (asymptotic series once erfc underflows).
double log_sf(double x) noexcept;
// Mill's ratio upper bound pdf(x)/x, valid for x > 0.
double mills_bound(double x) noexcept;

}  // namespace gridruin::normal
