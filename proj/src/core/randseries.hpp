#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "rng.hpp"

namespace kloostpath {

// The three limit laws: mu with density 1/(pi sqrt(4-x^2)) on [-2,2],
// mu_U = delta_0/2 + mu/2, and the semicircle mu_ST with density
// sqrt(1-(x/2)^2)/pi.
enum class Law { Mu, MuU, MuST };

double sample_law(Law law, Rng& rng);

// Exact m-th moment of the law: mu gives delta_{2|m} binom(m, m/2),
// mu_ST gives Catalan numbers, mu_U halves the mu moments for m >= 1.
double law_moment(Law law, unsigned m);

enum class FrequencyFilter { All, QRClass };

// Truncated random Fourier series sum_h beta(h;t) U_h over the frequency
// set; QRClass keeps h with (a1-h)b0 a residue class mod p.
struct SeriesSpec {
    Law law = Law::Mu;
    unsigned H = 1000;
    FrequencyFilter filter = FrequencyFilter::All;
    std::uint64_t a1 = 1;
    std::uint64_t b0 = 1;
    std::uint64_t p = 3;
    std::uint64_t seed = 0;
};

std::vector<std::int64_t> frequency_set(const SeriesSpec& spec);

// beta(h;t) = (e(ht)-1)/(2 pi i h), beta(0;t) = t.
std::complex<double> series_beta(std::int64_t h, double t);

// Deterministic per-frequency draw stream: U_h depends only on
// (seed, h, index), never on evaluation order.
double law_draw_for(Law law, std::uint64_t seed, std::int64_t h, std::uint64_t index);

std::complex<double> series_eval(const SeriesSpec& spec, double t,
                                 const std::map<std::int64_t, double>& draws);

// One truncated-series sample with fresh draws at the given index.
std::complex<double> series_sample(const SeriesSpec& spec, double t,
                                   std::uint64_t sample_index);

// Exact complex moment E prod_i conj(S(t_i))^{m_i} S(t_i)^{n_i} of the
// truncated series, by grouping frequency tuples by equality pattern
// (set partitions; blocks must carry even law moments).  Total degree <= 8.
struct SeriesMoment {
    std::complex<double> value;
    double truncation_tail = 0.0; // O(H^{-1/2}) bound witness
};

SeriesMoment exact_series_moment(const SeriesSpec& spec,
                                 const std::vector<double>& t,
                                 const std::vector<unsigned>& conj_exp,
                                 const std::vector<unsigned>& plain_exp);

// Glued variable: a1 drawn uniformly from (Z/pZ)^x, then a truncated
// QR-filtered series value with fresh mu draws.
std::pair<std::uint64_t, std::complex<double>> sample_glued(std::uint64_t p,
                                                            std::uint64_t b0,
                                                            double t, unsigned H,
                                                            Rng& rng);

} // namespace kloostpath
