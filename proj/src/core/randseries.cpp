#include "randseries.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "errors.hpp"
#include "modring.hpp"

namespace kloostpath {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

double catalan(unsigned k) {
    // C_k = binom(2k, k)/(k+1)
    double c = 1.0;
    for (unsigned i = 0; i < k; ++i)
        c = c * 2.0 * (2.0 * i + 1.0) / (i + 2.0);
    return c;
}

double binom_d(unsigned n, unsigned k) {
    double r = 1.0;
    for (unsigned i = 1; i <= k; ++i)
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// inverse CDF of the angle density (2/pi) sin^2 on [0, pi] by bisection
double st_angle(double u) {
    double lo = 0.0, hi = kPi;
    for (int i = 0; i < 64; ++i) {
        double mid = 0.5 * (lo + hi);
        double cdf = (mid - 0.5 * std::sin(2.0 * mid)) / kPi;
        if (cdf < u) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double sample_law(Law law, Rng& rng) {
    switch (law) {
        case Law::Mu:
            return 2.0 * std::cos(kPi * rng.next_unit());
        case Law::MuU: {
            bool zero = rng.next_u64() & 1;
            double draw = 2.0 * std::cos(kPi * rng.next_unit());
            return zero ? 0.0 : draw;
        }
        case Law::MuST:
            return 2.0 * std::cos(st_angle(rng.next_unit()));
    }
    return 0.0;
}

double law_moment(Law law, unsigned m) {
    if (m == 0) return 1.0;
    if (m % 2 != 0) return 0.0;
    switch (law) {
        case Law::Mu: return binom_d(m, m / 2);
        case Law::MuU: return 0.5 * binom_d(m, m / 2);
        case Law::MuST: return catalan(m / 2);
    }
    return 0.0;
}

std::vector<std::int64_t> frequency_set(const SeriesSpec& spec) {
    std::vector<std::int64_t> freqs;
    const auto H = static_cast<std::int64_t>(spec.H);
    if (spec.filter == FrequencyFilter::All) {
        for (std::int64_t h = -H; h <= H; ++h) freqs.push_back(h);
        return freqs;
    }
    PrimePowerModulus base(spec.p, 1);
    std::uint64_t a1 = spec.a1 % spec.p;
    std::uint64_t b0 = spec.b0 % spec.p;
    if (b0 == 0) throw NotAUnit("series spec requires b0 a unit mod p");
    for (std::int64_t h = -H; h <= H; ++h) {
        std::int64_t diff = static_cast<std::int64_t>(a1) - h;
        std::int64_t cls = diff % static_cast<std::int64_t>(spec.p);
        if (cls < 0) cls += static_cast<std::int64_t>(spec.p);
        if (base.legendre(static_cast<std::uint64_t>(cls) * b0) == 1)
            freqs.push_back(h);
    }
    return freqs;
}

std::complex<double> series_beta(std::int64_t h, double t) {
    if (h == 0) return {t, 0.0};
    double x = 2.0 * kPi * static_cast<double>(h) * t;
    std::complex<double> num{std::cos(x) - 1.0, std::sin(x)};
    return num / std::complex<double>{0.0, 2.0 * kPi * static_cast<double>(h)};
}

double law_draw_for(Law law, std::uint64_t seed, std::int64_t h, std::uint64_t index) {
    auto stream = static_cast<std::uint64_t>(h);
    double u = Rng::stream_unit(seed, stream, 2 * index);
    switch (law) {
        case Law::Mu:
            return 2.0 * std::cos(kPi * u);
        case Law::MuU: {
            bool zero = Rng::stream_draw(seed ^ 0x517cc1b727220a95ull, stream, index) & 1;
            return zero ? 0.0 : 2.0 * std::cos(kPi * u);
        }
        case Law::MuST:
            return 2.0 * std::cos(st_angle(u));
    }
    return 0.0;
}

std::complex<double> series_eval(const SeriesSpec& spec, double t,
                                 const std::map<std::int64_t, double>& draws) {
    std::complex<double> sum{0.0, 0.0};
    for (std::int64_t h : frequency_set(spec)) {
        auto it = draws.find(h);
        if (it == draws.end())
            throw UsageError("series_eval: missing draw for a frequency in the set");
        sum += series_beta(h, t) * it->second;
    }
    return sum;
}

std::complex<double> series_sample(const SeriesSpec& spec, double t,
                                   std::uint64_t sample_index) {
    std::complex<double> sum{0.0, 0.0};
    for (std::int64_t h : frequency_set(spec))
        sum += series_beta(h, t) * law_draw_for(spec.law, spec.seed, h, sample_index);
    return sum;
}

namespace {

struct SlotFactor {
    double t;
    bool conj;
};

// canonical key of a partition given as block bitmasks
std::uint64_t partition_key(std::vector<std::uint8_t> masks) {
    std::sort(masks.begin(), masks.end());
    std::uint64_t key = 0;
    for (std::uint8_t m : masks) key = (key << 8) | m;
    return key;
}

// all set partitions of {0..count-1} as restricted-growth strings
void enumerate_partitions(unsigned count,
                          const std::function<void(const std::vector<unsigned>&)>& visit) {
    std::vector<unsigned> rgs(count, 0);
    std::function<void(unsigned, unsigned)> rec = [&](unsigned pos, unsigned max_id) {
        if (pos == count) { visit(rgs); return; }
        for (unsigned id = 0; id <= max_id + 1 && id <= pos; ++id) {
            rgs[pos] = id;
            rec(pos + 1, std::max(max_id, id));
        }
    };
    if (count == 0) { visit(rgs); return; }
    rgs[0] = 0;
    rec(1, 0);
}

} // namespace

SeriesMoment exact_series_moment(const SeriesSpec& spec,
                                 const std::vector<double>& t,
                                 const std::vector<unsigned>& conj_exp,
                                 const std::vector<unsigned>& plain_exp) {
    if (t.size() != conj_exp.size() || t.size() != plain_exp.size())
        throw UsageError("exact_series_moment arrays must have equal length");

    std::vector<SlotFactor> slots;
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (unsigned e = 0; e < conj_exp[i]; ++e) slots.push_back({t[i], true});
        for (unsigned e = 0; e < plain_exp[i]; ++e) slots.push_back({t[i], false});
    }
    const auto ell = static_cast<unsigned>(slots.size());
    if (ell > 8) throw UsageError("exact_series_moment supports total degree <= 8");

    SeriesMoment out;
    out.truncation_tail = 1.0 / std::sqrt(static_cast<double>(std::max(1u, spec.H)));
    if (ell == 0) {
        out.value = {1.0, 0.0};
        return out;
    }

    const std::vector<std::int64_t> freqs = frequency_set(spec);

    // per-slot factor tables over the frequency set
    std::vector<std::vector<std::complex<double>>> table(ell);
    for (unsigned s = 0; s < ell; ++s) {
        table[s].reserve(freqs.size());
        for (std::int64_t h : freqs) {
            std::complex<double> b = series_beta(h, slots[s].t);
            table[s].push_back(slots[s].conj ? std::conj(b) : b);
        }
    }

    // S(mask) = sum over the frequency set of the product of slot factors
    std::unordered_map<std::uint16_t, std::complex<double>> block_sums;
    auto block_sum = [&](std::uint8_t mask) {
        auto it = block_sums.find(mask);
        if (it != block_sums.end()) return it->second;
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
            std::complex<double> prod{1.0, 0.0};
            for (unsigned s = 0; s < ell; ++s)
                if (mask & (1u << s)) prod *= table[s][fi];
            sum += prod;
        }
        block_sums.emplace(mask, sum);
        return sum;
    };

    // D(partition) = sum over assignments of pairwise-distinct frequencies to
    // blocks; computed from unrestricted products by peeling off coarsenings.
    std::unordered_map<std::uint64_t, std::complex<double>> d_memo;
    std::function<std::complex<double>(const std::vector<std::uint8_t>&)> distinct_sum =
        [&](const std::vector<std::uint8_t>& blocks) -> std::complex<double> {
        std::uint64_t key = partition_key(blocks);
        auto it = d_memo.find(key);
        if (it != d_memo.end()) return it->second;

        std::complex<double> value{1.0, 0.0};
        for (std::uint8_t mask : blocks) value *= block_sum(mask);

        const auto nb = static_cast<unsigned>(blocks.size());
        enumerate_partitions(nb, [&](const std::vector<unsigned>& rgs) {
            unsigned groups = *std::max_element(rgs.begin(), rgs.end()) + 1;
            if (groups == nb) return; // the all-singleton coarsening is the identity
            std::vector<std::uint8_t> merged(groups, 0);
            for (unsigned b = 0; b < nb; ++b) merged[rgs[b]] |= blocks[b];
            value -= distinct_sum(merged);
        });
        d_memo.emplace(key, value);
        return value;
    };

    std::complex<double> moment{0.0, 0.0};
    enumerate_partitions(ell, [&](const std::vector<unsigned>& rgs) {
        unsigned groups = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<std::uint8_t> blocks(groups, 0);
        for (unsigned s = 0; s < ell; ++s) blocks[rgs[s]] |= static_cast<std::uint8_t>(1u << s);
        double weight = 1.0;
        for (std::uint8_t mask : blocks)
            weight *= law_moment(spec.law, static_cast<unsigned>(__builtin_popcount(mask)));
        if (weight == 0.0) return;
        moment += weight * distinct_sum(blocks);
    });
    out.value = moment;
    return out;
}

std::pair<std::uint64_t, std::complex<double>> sample_glued(std::uint64_t p,
                                                            std::uint64_t b0,
                                                            double t, unsigned H,
                                                            Rng& rng) {
    if (p < 3) throw UsageError("sample_glued requires an odd prime p");
    std::uint64_t a1 = 1 + rng.next_below(p - 1);
    SeriesSpec spec;
    spec.law = Law::Mu;
    spec.H = H;
    spec.filter = FrequencyFilter::QRClass;
    spec.a1 = a1;
    spec.b0 = b0;
    spec.p = p;
    std::complex<double> sum{0.0, 0.0};
    for (std::int64_t h : frequency_set(spec))
        sum += series_beta(h, t) * (2.0 * std::cos(kPi * rng.next_unit()));
    return {a1, sum};
}

} // namespace kloostpath
