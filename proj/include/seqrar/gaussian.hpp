#pragma once

namespace seqrar {

// Standard normal density, CDF and quantile. The CDF is erfc-based so both
// tails stay accurate far out (needed by O'Brien-Fleming-like spending, whose
// first-look spend is ~1e-5). The quantile is a rational approximation
// polished with two Newton steps; absolute error is at machine-precision
// level, well under the 1e-12 the boundary solver relies on.

double normal_pdf(double x);
double normal_cdf(double x);    // P(Z <= x)
double normal_cdf_c(double x);  // P(Z > x), no cancellation in the upper tail
double normal_quantile(double p);

} // namespace seqrar
