#pragma once

#include "doi/rng.hpp"

namespace doi {

double log_normal_pdf(double x, double mean, double var);
double log_gamma_pdf(double x, double shape, double scale);
double log_beta_pdf(double x, double a, double b);
double normal_cdf(double x);

/// Exact draw from Normal(mean, var) restricted to (lo, hi). Either bound may be
/// infinite. Tails use exponential-proposal rejection, so bounds far from the
/// mean do not stall.
double sample_truncated_normal(Rng& rng, double mean, double var, double lo, double hi);

}  // namespace doi
