#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "core/moments.hpp"
#include "core/randseries.hpp"
#include "core/rng.hpp"

using namespace kloostpath;

namespace {

// Simpson quadrature oracle for moments of the semicircle density
double st_moment_quadrature(unsigned m) {
    const int steps = 20000;
    const double a = -2.0, b = 2.0;
    double h = (b - a) / steps;
    auto f = [m](double x) {
        return std::pow(x, m) * std::sqrt(1.0 - 0.25 * x * x) / 3.141592653589793;
    };
    double sum = f(a) + f(b);
    for (int i = 1; i < steps; ++i)
        sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

} // namespace

TEST_CASE("law moments") {
    // mu: delta_{2|m} binom(m, m/2) = 1, 0, 2, 0, 6, 0, 20
    const double expected[] = {1, 0, 2, 0, 6, 0, 20};
    for (unsigned m = 0; m <= 6; ++m)
        CHECK(law_moment(Law::Mu, m) == doctest::Approx(expected[m]));

    // semicircle moments are Catalan numbers, cross-checked by quadrature
    CHECK(law_moment(Law::MuST, 2) == doctest::Approx(1.0));
    CHECK(law_moment(Law::MuST, 4) == doctest::Approx(2.0));
    CHECK(st_moment_quadrature(2) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(st_moment_quadrature(4) == doctest::Approx(2.0).epsilon(1e-6));

    // mu_U halves the mu moments
    CHECK(law_moment(Law::MuU, 2) == doctest::Approx(1.0));
    CHECK(law_moment(Law::MuU, 4) == doctest::Approx(3.0));
}

TEST_CASE("samplers match their moments") {
    const std::uint64_t N = 200000;
    for (Law law : {Law::Mu, Law::MuU, Law::MuST}) {
        Rng rng(1000 + static_cast<int>(law));
        double m1 = 0, m2 = 0, m4 = 0;
        for (std::uint64_t i = 0; i < N; ++i) {
            double x = sample_law(law, rng);
            CHECK(x >= -2.0);
            CHECK(x <= 2.0);
            m1 += x;
            m2 += x * x;
            m4 += x * x * x * x;
        }
        m1 /= N; m2 /= N; m4 /= N;
        // 4 sigma windows from the exact higher moments
        double s2 = std::sqrt((law_moment(law, 4) - std::pow(law_moment(law, 2), 2)) / N);
        double s1 = std::sqrt(law_moment(law, 2) / N);
        double s4 = std::sqrt((law_moment(law, 8) - std::pow(law_moment(law, 4), 2)) / N);
        CHECK(std::abs(m1 - law_moment(law, 1)) < 4 * s1);
        CHECK(std::abs(m2 - law_moment(law, 2)) < 4 * s2);
        CHECK(std::abs(m4 - law_moment(law, 4)) < 4 * s4);
    }
}

TEST_CASE("mu sampler passes a KS check") {
    const std::uint64_t N = 100000;
    Rng rng(4242);
    std::vector<double> draws(N);
    for (auto& d : draws) d = sample_law(Law::Mu, rng);
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (std::uint64_t i = 0; i < N; ++i) {
        double cdf = arcsine_cdf(draws[i]);
        ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / N));
        ks = std::max(ks, std::abs(static_cast<double>(i + 1) / N - cdf));
    }
    CHECK(ks < 0.006); // ~1.63/sqrt(N) at the 1% level
}

TEST_CASE("frequency sets") {
    SeriesSpec spec;
    spec.H = 9;
    spec.filter = FrequencyFilter::QRClass;
    spec.p = 3;
    spec.a1 = 1;
    spec.b0 = 1;
    // (1 - h) * 1 must be the class 1 mod 3, so h = 0 (mod 3)
    auto freqs = frequency_set(spec);
    REQUIRE(freqs.size() == 7);
    for (std::int64_t h : freqs) CHECK(((h % 3) + 3) % 3 == 0);

    spec.filter = FrequencyFilter::All;
    CHECK(frequency_set(spec).size() == 19);
}

TEST_CASE("series evaluation") {
    SeriesSpec spec;
    spec.H = 4;
    spec.filter = FrequencyFilter::All;

    std::map<std::int64_t, double> draws;
    for (std::int64_t h = -4; h <= 4; ++h) draws[h] = 0.0;

    SUBCASE("zero draws give zero") {
        CHECK(std::abs(series_eval(spec, 0.7, draws)) == 0.0);
    }

    SUBCASE("t = 0 vanishes identically") {
        for (auto& [h, d] : draws) d = 1.5;
        CHECK(std::abs(series_eval(spec, 0.0, draws)) < 1e-15);
    }

    SUBCASE("single frequency h = 0 contributes t times the draw") {
        SeriesSpec only0;
        only0.H = 0;
        only0.filter = FrequencyFilter::All;
        std::map<std::int64_t, double> d0{{0, 1.25}};
        auto v = series_eval(only0, 0.4, d0);
        CHECK(v.real() == doctest::Approx(0.4 * 1.25));
        CHECK(v.imag() == doctest::Approx(0.0));
    }

    SUBCASE("missing draw is a usage error") {
        draws.erase(2);
        CHECK_THROWS_AS(series_eval(spec, 0.5, draws), UsageError);
    }
}

TEST_CASE("draws are reproducible independently of evaluation order") {
    SeriesSpec spec;
    spec.H = 16;
    spec.seed = 99;
    double a = law_draw_for(Law::Mu, spec.seed, 7, 3);
    double b = law_draw_for(Law::Mu, spec.seed, -7, 3);
    double c = law_draw_for(Law::Mu, spec.seed, 7, 4);
    CHECK(a == law_draw_for(Law::Mu, spec.seed, 7, 3));
    CHECK(a != b);
    CHECK(a != c);
    CHECK(series_sample(spec, 0.3, 5) == series_sample(spec, 0.3, 5));
}

TEST_CASE("exact series moments") {
    SeriesSpec spec;
    spec.law = Law::Mu;
    spec.H = 12;
    spec.filter = FrequencyFilter::All;

    SUBCASE("zeroth and first moments") {
        CHECK(exact_series_moment(spec, {}, {}, {}).value ==
              std::complex<double>{1.0, 0.0});
        auto first = exact_series_moment(spec, {0.4}, {0}, {1});
        CHECK(std::abs(first.value) < 1e-15);
    }

    SUBCASE("second absolute moment equals 2 sum |beta|^2") {
        double t = 0.37;
        auto second = exact_series_moment(spec, {t}, {1}, {1});
        double direct = 0.0;
        for (std::int64_t h : frequency_set(spec))
            direct += 2.0 * std::norm(series_beta(h, t));
        CHECK(second.value.real() == doctest::Approx(direct).epsilon(1e-12));
        CHECK(std::abs(second.value.imag()) < 1e-15);
    }

    SUBCASE("fourth moment against a brute-force tuple oracle") {
        SeriesSpec tiny;
        tiny.law = Law::Mu;
        tiny.H = 3;
        tiny.filter = FrequencyFilter::All;
        double t = 0.61;
        auto value = exact_series_moment(tiny, {t}, {2}, {2});

        // oracle: enumerate all frequency 4-tuples and average by
        // independence and the exact mu moments
        auto freqs = frequency_set(tiny);
        std::complex<double> oracle{0.0, 0.0};
        for (std::int64_t h1 : freqs)
            for (std::int64_t h2 : freqs)
                for (std::int64_t h3 : freqs)
                    for (std::int64_t h4 : freqs) {
                        std::map<std::int64_t, unsigned> mult;
                        ++mult[h1]; ++mult[h2]; ++mult[h3]; ++mult[h4];
                        double e = 1.0;
                        for (const auto& [h, c] : mult) e *= law_moment(Law::Mu, c);
                        if (e == 0.0) continue;
                        oracle += std::conj(series_beta(h1, t)) *
                                  std::conj(series_beta(h2, t)) * series_beta(h3, t) *
                                  series_beta(h4, t) * e;
                    }
        CHECK(std::abs(value.value - oracle) < 1e-10);
    }

    SUBCASE("mixed-time covariance against the tuple oracle") {
        SeriesSpec tiny;
        tiny.law = Law::MuST;
        tiny.H = 2;
        tiny.filter = FrequencyFilter::All;
        auto value = exact_series_moment(tiny, {0.25, 0.75}, {1, 0}, {0, 1});
        auto freqs = frequency_set(tiny);
        std::complex<double> oracle{0.0, 0.0};
        for (std::int64_t h1 : freqs)
            for (std::int64_t h2 : freqs) {
                double e = h1 == h2 ? law_moment(Law::MuST, 2) : 0.0;
                if (e == 0.0) continue;
                oracle += std::conj(series_beta(h1, 0.25)) * series_beta(h2, 0.75) * e;
            }
        CHECK(std::abs(value.value - oracle) < 1e-12);
    }

    SUBCASE("degree cap") {
        CHECK_THROWS_AS(exact_series_moment(spec, {0.5}, {5}, {4}), UsageError);
    }
}

TEST_CASE("series variance facts") {
    // E(Kl(t)) = 0 always; V(Kl(t)) <= t on classes whose frequency set
    // omits h = 0 (here p=3, a1=2, b0=1 forces h = 1 mod 3)
    SeriesSpec spec;
    spec.law = Law::Mu;
    spec.H = 4000;
    spec.filter = FrequencyFilter::QRClass;
    spec.p = 3;
    spec.a1 = 2;
    spec.b0 = 1;
    for (std::int64_t h : frequency_set(spec)) CHECK(h != 0);
    for (double t : {0.1, 0.3, 0.5, 0.8, 1.0}) {
        auto var = exact_series_moment(spec, {t}, {1}, {1});
        CHECK(var.value.real() <= t + 1e-9);
        CHECK(std::abs(exact_series_moment(spec, {t}, {0}, {1}).value) < 1e-15);
    }
}

TEST_CASE("Monte Carlo second moment matches the exact value") {
    SeriesSpec spec;
    spec.law = Law::Mu;
    spec.H = 64;
    spec.filter = FrequencyFilter::QRClass;
    spec.p = 3;
    spec.a1 = 1;
    spec.b0 = 1;
    spec.seed = 31337;
    double t = 0.5;

    auto exact = exact_series_moment(spec, {t}, {1}, {1});
    const std::uint64_t N = 20000;
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < N; ++i) {
        double v = std::norm(series_sample(spec, t, i));
        double delta = v - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (v - mean);
    }
    double sigma = std::sqrt(m2 / N / N);
    CHECK(std::abs(mean - exact.value.real()) < 3.0 * sigma);
}

TEST_CASE("truncation tail decays like 1/H") {
    // E|Kl - Kl_H|^2 estimated against a much longer truncation with shared
    // draws; the log-log slope across H in {8, 32, 128} sits near -1
    SeriesSpec full;
    full.law = Law::Mu;
    full.H = 2048;
    full.filter = FrequencyFilter::QRClass;
    full.p = 3;
    full.a1 = 1;
    full.b0 = 1;
    full.seed = 777;

    const std::uint64_t N = 4000;
    const double t = 0.5;
    std::vector<unsigned> hs{8, 32, 128};
    std::vector<double> tails;
    for (unsigned H : hs) {
        SeriesSpec trunc = full;
        trunc.H = H;
        double acc = 0.0;
        for (std::uint64_t i = 0; i < N; ++i)
            acc += std::norm(series_sample(full, t, i) - series_sample(trunc, t, i));
        tails.push_back(acc / static_cast<double>(N));
    }
    double slope = std::log(tails[2] / tails[0]) /
                   std::log(static_cast<double>(hs[2]) / static_cast<double>(hs[0]));
    CHECK(slope > -1.3);
    CHECK(slope < -0.7);
}

TEST_CASE("glued variable") {
    SUBCASE("t = 0 vanishes") {
        Rng rng(5);
        auto [a1, value] = sample_glued(11, 1, 0.0, 64, rng);
        CHECK(a1 >= 1);
        CHECK(a1 <= 10);
        CHECK(std::abs(value) < 1e-15);
    }

    SUBCASE("restriction to a class reproduces the series definition") {
        const std::uint64_t seed = 90210;
        Rng rng(seed);
        auto [a1, value] = sample_glued(11, 3, 0.45, 32, rng);

        Rng replay(seed);
        std::uint64_t a1_replay = 1 + replay.next_below(10);
        REQUIRE(a1_replay == a1);
        SeriesSpec spec;
        spec.law = Law::Mu;
        spec.H = 32;
        spec.filter = FrequencyFilter::QRClass;
        spec.p = 11;
        spec.a1 = a1;
        spec.b0 = 3;
        std::complex<double> expect{0.0, 0.0};
        for (std::int64_t h : frequency_set(spec))
            expect += series_beta(h, 0.45) *
                      (2.0 * std::cos(3.141592653589793 * replay.next_unit()));
        CHECK(std::abs(value - expect) < 1e-15);
    }
}

TEST_CASE("QR-filtered mu series vs mu_U over all frequencies") {
    // matching second moments require the QR set to carry half the beta mass;
    // true on average over classes (density 1/2) and false for p = 3 where a
    // single class keeps only a third of the frequencies
    const double t = 0.5;
    const unsigned H = 2000;

    auto mass = [&](const SeriesSpec& spec) {
        double sum = 0.0;
        for (std::int64_t h : frequency_set(spec)) sum += std::norm(series_beta(h, t));
        return sum;
    };

    SeriesSpec all;
    all.law = Law::MuU;
    all.H = H;
    all.filter = FrequencyFilter::All;
    double mu_u_moment = mass(all) * law_moment(Law::MuU, 2);

    SUBCASE("class-averaged (density 1/2) masses agree for p = 101") {
        double averaged = 0.0;
        for (std::uint64_t a1 = 1; a1 < 101; ++a1) {
            SeriesSpec qr;
            qr.law = Law::Mu;
            qr.H = H;
            qr.filter = FrequencyFilter::QRClass;
            qr.p = 101;
            qr.a1 = a1;
            qr.b0 = 1;
            averaged += mass(qr) * law_moment(Law::Mu, 2);
        }
        averaged /= 100.0;
        CHECK(std::abs(averaged - mu_u_moment) < 0.02 * mu_u_moment);
    }

    SUBCASE("a fixed p = 3 class does not match") {
        SeriesSpec qr;
        qr.law = Law::Mu;
        qr.H = H;
        qr.filter = FrequencyFilter::QRClass;
        qr.p = 3;
        qr.a1 = 1;
        qr.b0 = 1;
        double qr_moment = mass(qr) * law_moment(Law::Mu, 2);
        CHECK(std::abs(qr_moment - mu_u_moment) > 0.03);
    }
}
