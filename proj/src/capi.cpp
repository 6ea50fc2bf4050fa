#include "kloostpath/kloostpath.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/klooster.hpp"
#include "core/modring.hpp"
#include "core/moments.hpp"
#include "core/paths.hpp"

using namespace kloostpath;

struct kp_modulus {
    PrimePowerModulus impl;
};

struct kp_branch {
    SqrtBranch impl;
};

struct kp_path {
    KloostermanPath impl;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs fn, translating the core exception taxonomy into status codes.
template <typename Fn>
kp_status guarded(Fn&& fn) {
    try {
        fn();
        return KP_OK;
    } catch (const UsageError& e) {
        set_error(e.what());
        return KP_ERR_INVALID_ARGUMENT;
    } catch (const OverflowError& e) {
        set_error(e.what());
        return KP_ERR_OVERFLOW;
    } catch (const NotAUnit& e) {
        set_error(e.what());
        return KP_ERR_NOT_A_UNIT;
    } catch (const NotASquare& e) {
        set_error(e.what());
        return KP_ERR_NOT_A_SQUARE;
    } catch (const UnsupportedDepth& e) {
        set_error(e.what());
        return KP_ERR_UNSUPPORTED_DEPTH;
    } catch (const PreconditionFailed& e) {
        set_error(e.what());
        return KP_ERR_PRECONDITION;
    } catch (const SingularQuadratic& e) {
        set_error(e.what());
        return KP_ERR_SINGULAR_QUADRATIC;
    } catch (const InvalidPhase& e) {
        set_error(e.what());
        return KP_ERR_INVALID_PHASE;
    } catch (const std::ios_base::failure& e) {
        set_error(e.what());
        return KP_ERR_IO;
    } catch (const nlohmann::json::exception& e) {
        set_error(e.what());
        return KP_ERR_INVALID_ARGUMENT;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return KP_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return KP_ERR_INTERNAL;
    }
}

kp_status require(bool ok, const char* message) {
    if (ok) return KP_OK;
    set_error(message);
    return KP_ERR_INVALID_ARGUMENT;
}

} // namespace

extern "C" {

const char* kp_version(void) { return "0.1.0"; }

const char* kp_last_error_message(void) { return g_last_error.c_str(); }

void kp_string_free(char* s) { std::free(s); }

kp_status kp_modulus_create(uint64_t p, uint32_t n, kp_modulus** out) {
    if (kp_status s = require(out != nullptr, "null output pointer")) return s;
    return guarded([&] { *out = new kp_modulus{PrimePowerModulus(p, n)}; });
}

void kp_modulus_free(kp_modulus* m) { delete m; }

uint64_t kp_modulus_p(const kp_modulus* m) { return m ? m->impl.p() : 0; }
uint32_t kp_modulus_n(const kp_modulus* m) { return m ? m->impl.n() : 0; }
uint64_t kp_modulus_q(const kp_modulus* m) { return m ? m->impl.q() : 0; }
uint64_t kp_modulus_phi(const kp_modulus* m) { return m ? m->impl.phi() : 0; }

kp_status kp_mul_mod(const kp_modulus* m, uint64_t a, uint64_t b, uint64_t* out) {
    if (kp_status s = require(m && out, "null argument")) return s;
    if (kp_status s = require(a < m->impl.q() && b < m->impl.q(),
                              "residues must lie in [0, q)"))
        return s;
    return guarded([&] { *out = m->impl.mul(a, b); });
}

kp_status kp_inv_mod(const kp_modulus* m, uint64_t x, uint64_t* out) {
    if (kp_status s = require(m && out, "null argument")) return s;
    return guarded([&] { *out = m->impl.inv(x); });
}

kp_status kp_ord_p(const kp_modulus* m, uint64_t x, uint32_t* out, int* infinite) {
    if (kp_status s = require(m && out && infinite, "null argument")) return s;
    return guarded([&] {
        Valuation v = m->impl.ord(x);
        *out = v.value;
        *infinite = v.infinite ? 1 : 0;
    });
}

kp_status kp_jacobi(const kp_modulus* m, uint64_t x, int* out) {
    if (kp_status s = require(m && out, "null argument")) return s;
    return guarded([&] { *out = m->impl.jacobi(x); });
}

kp_status kp_branch_create_default(const kp_modulus* m, kp_branch** out) {
    if (kp_status s = require(m && out, "null argument")) return s;
    return guarded([&] { *out = new kp_branch{SqrtBranch(m->impl)}; });
}

kp_status kp_branch_create(const kp_modulus* m, const uint64_t* choice, size_t len,
                           kp_branch** out) {
    if (kp_status s = require(m && choice && out, "null argument")) return s;
    return guarded([&] {
        std::vector<uint64_t> table(choice, choice + len);
        *out = new kp_branch{SqrtBranch(m->impl, table)};
    });
}

void kp_branch_free(kp_branch* br) { delete br; }

kp_status kp_sqrt_branch(kp_branch* br, uint64_t x, uint64_t* out) {
    if (kp_status s = require(br && out, "null argument")) return s;
    return guarded([&] { *out = br->impl.sqrt(x); });
}

kp_status kp_kloosterman_naive(const kp_modulus* m, uint64_t a, uint64_t b, double* re,
                               double* im) {
    if (kp_status s = require(m && re && im, "null argument")) return s;
    return guarded([&] {
        auto value = kloosterman_naive(m->impl, a, b);
        *re = value.real();
        *im = value.imag();
    });
}

kp_status kp_kloosterman_closed(const kp_modulus* m, kp_branch* br, uint64_t a,
                                uint64_t b, double* out) {
    if (kp_status s = require(m && br && out, "null argument")) return s;
    return guarded([&] { *out = kloosterman_closed(m->impl, a, b, br->impl); });
}

kp_status kp_summand_census(const kp_modulus* m, uint64_t a, uint64_t b,
                            uint64_t* distinct, uint64_t* total) {
    if (kp_status s = require(m && distinct && total, "null argument")) return s;
    return guarded([&] {
        SummandCensus census = summand_census(m->impl, a, b);
        *distinct = census.distinct;
        *total = census.total;
    });
}

kp_status kp_multiplicity_check(const kp_modulus* m, uint32_t kappa, int* pass,
                                uint64_t* expected, uint64_t* classes_checked) {
    if (kp_status s = require(m && pass && expected && classes_checked, "null argument"))
        return s;
    return guarded([&] {
        MultiplicityReport report = multiplicity_check(m->impl, kappa);
        *pass = report.pass ? 1 : 0;
        *expected = report.expected;
        *classes_checked = report.classes_checked;
    });
}

kp_status kp_path_create(const kp_modulus* m, uint64_t a, uint64_t b,
                         kp_path_variant variant, kp_path** out) {
    if (kp_status s = require(m && out, "null argument")) return s;
    return guarded([&] {
        KloostermanPath path;
        switch (variant) {
            case KP_PATH_STANDARD:
                path = path_vertices(m->impl, a, b);
                break;
            case KP_PATH_RENORMALIZED:
                path = path_vertices(m->impl, a, b);
                path.variant = PathVariant::Renormalized;
                break;
            case KP_PATH_REARRANGED:
                path = rearranged_vertices(m->impl, a, b);
                break;
            default:
                throw UsageError("unknown path variant");
        }
        *out = new kp_path{std::move(path)};
    });
}

void kp_path_free(kp_path* path) { delete path; }

kp_status kp_path_vertex_count(const kp_path* path, size_t* out) {
    if (kp_status s = require(path && out, "null argument")) return s;
    *out = path->impl.vertices.size();
    return KP_OK;
}

kp_status kp_path_vertex(const kp_path* path, size_t index, double* re, double* im) {
    if (kp_status s = require(path && re && im, "null argument")) return s;
    if (kp_status s = require(index < path->impl.vertices.size(), "vertex index out of range"))
        return s;
    *re = path->impl.vertices[index].real();
    *im = path->impl.vertices[index].imag();
    return KP_OK;
}

kp_status kp_path_eval(const kp_path* path, double t, double* re, double* im) {
    if (kp_status s = require(path && re && im, "null argument")) return s;
    return guarded([&] {
        auto value = path_eval(path->impl, t);
        *re = value.real();
        *im = value.imag();
    });
}

namespace {

PathFormat to_format(kp_path_format format) {
    switch (format) {
        case KP_FORMAT_CSV: return PathFormat::Csv;
        case KP_FORMAT_JSON: return PathFormat::Json;
        case KP_FORMAT_SVG: return PathFormat::Svg;
    }
    throw UsageError("unknown path format");
}

} // namespace

kp_status kp_path_export(const kp_path* path, kp_path_format format, char** out) {
    if (kp_status s = require(path && out, "null argument")) return s;
    return guarded([&] {
        std::ostringstream stream;
        export_path(path->impl, to_format(format), stream);
        *out = dup_string(stream.str());
        if (!*out) throw std::bad_alloc();
    });
}

kp_status kp_path_export_file(const kp_path* path, kp_path_format format,
                              const char* filename) {
    if (kp_status s = require(path && filename, "null argument")) return s;
    return guarded([&] {
        std::ofstream stream(filename, std::ios::binary);
        if (!stream) throw std::ios_base::failure("cannot open output file");
        export_path(path->impl, to_format(format), stream);
        stream.flush();
        if (!stream) throw std::ios_base::failure("write failed");
    });
}

kp_status kp_completion_alpha(const kp_modulus* m, double t, int64_t h, double* re,
                              double* im) {
    if (kp_status s = require(m && re && im, "null argument")) return s;
    return guarded([&] {
        auto value = completion_alpha(m->impl, t, h);
        *re = value.real();
        *im = value.imag();
    });
}

kp_status kp_completion_beta(double t, int64_t h, double* re, double* im) {
    if (kp_status s = require(re && im, "null argument")) return s;
    return guarded([&] {
        auto value = completion_beta(t, h);
        *re = value.real();
        *im = value.imag();
    });
}

kp_status kp_completion_residual(const kp_modulus* m, kp_branch* br, uint64_t a,
                                 uint64_t b, double t, double* out) {
    if (kp_status s = require(m && br && out, "null argument")) return s;
    return guarded(
        [&] { *out = completion_identity_check(m->impl, a, b, t, br->impl); });
}

kp_status kp_equidist_ks(const kp_modulus* m, kp_branch* br, uint64_t a1, uint64_t b0,
                         double* ks, int* degenerate) {
    if (kp_status s = require(m && br && ks && degenerate, "null argument")) return s;
    return guarded([&] {
        EquidistResult result = equidist_stat(m->impl, a1, b0, br->impl);
        *ks = result.ks;
        *degenerate = result.degenerate ? 1 : 0;
    });
}

kp_status kp_sum_of_products(const kp_modulus* m, kp_branch* br, const uint64_t* tau,
                             const uint32_t* mult, size_t len, uint64_t a1, uint64_t b0,
                             double* out) {
    if (kp_status s = require(m && br && out && (len == 0 || (tau && mult)),
                              "null argument"))
        return s;
    return guarded([&] {
        ShiftMultiset mu;
        for (size_t i = 0; i < len; ++i) mu.mu[tau[i]] += mult[i];
        *out = sum_of_products(m->impl, mu, a1, b0, br->impl);
    });
}

kp_status kp_domain_count(const kp_modulus* m, const uint64_t* tau, size_t len,
                          uint64_t b0, uint64_t* exact, double* predicted) {
    if (kp_status s = require(m && exact && predicted && (len == 0 || tau),
                              "null argument"))
        return s;
    return guarded([&] {
        std::vector<uint64_t> shifts(tau, tau + len);
        DomainCount count = domain_count(m->impl, shifts, b0);
        *exact = count.exact;
        *predicted = count.predicted;
    });
}

kp_status kp_experiment_run(const char* config_json, char** report_json) {
    if (kp_status s = require(config_json && report_json, "null argument")) return s;
    return guarded([&] {
        nlohmann::json config = nlohmann::json::parse(config_json);
        nlohmann::ordered_json report = run_experiment(config);
        *report_json = dup_string(report.dump(2));
        if (!*report_json) throw std::bad_alloc();
    });
}

} // extern "C"
