/* kloostpath: Kloosterman sums and Kloosterman paths to prime-power moduli.
 *
 * C interface to the shared library.  All objects are opaque handles owned
 * by the library; every function returns a kp_status, with output through
 * pointer arguments.  On error, kp_last_error_message() describes the
 * failure for the calling thread.
 */

#ifndef KLOOSTPATH_H
#define KLOOSTPATH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define KLOOSTPATH_API __declspec(dllexport)
#else
#define KLOOSTPATH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kp_status {
    KP_OK = 0,
    KP_ERR_INVALID_ARGUMENT = 1,
    KP_ERR_OVERFLOW = 2,
    KP_ERR_NOT_A_UNIT = 3,
    KP_ERR_NOT_A_SQUARE = 4,
    KP_ERR_UNSUPPORTED_DEPTH = 5,
    KP_ERR_PRECONDITION = 6,
    KP_ERR_SINGULAR_QUADRATIC = 7,
    KP_ERR_INVALID_PHASE = 8,
    KP_ERR_IO = 9,
    KP_ERR_INTERNAL = 10
} kp_status;

typedef struct kp_modulus kp_modulus; /* the pair (p, n) with q = p^n */
typedef struct kp_branch kp_branch;   /* fixed square-root branch mod p^n */
typedef struct kp_path kp_path;       /* polygonal Kloosterman path */

KLOOSTPATH_API const char* kp_version(void);
KLOOSTPATH_API const char* kp_last_error_message(void);
KLOOSTPATH_API void kp_string_free(char* s);

/* ---- modulus ---- */
KLOOSTPATH_API kp_status kp_modulus_create(uint64_t p, uint32_t n, kp_modulus** out);
KLOOSTPATH_API void kp_modulus_free(kp_modulus* m);
KLOOSTPATH_API uint64_t kp_modulus_p(const kp_modulus* m);
KLOOSTPATH_API uint32_t kp_modulus_n(const kp_modulus* m);
KLOOSTPATH_API uint64_t kp_modulus_q(const kp_modulus* m);
KLOOSTPATH_API uint64_t kp_modulus_phi(const kp_modulus* m);

/* ---- ring operations; residues are representatives in [0, q) ---- */
KLOOSTPATH_API kp_status kp_mul_mod(const kp_modulus* m, uint64_t a, uint64_t b,
                                    uint64_t* out);
KLOOSTPATH_API kp_status kp_inv_mod(const kp_modulus* m, uint64_t x, uint64_t* out);
/* valuation: *out = ord_p(x) for nonzero classes; *infinite = 1 for x = 0 mod q */
KLOOSTPATH_API kp_status kp_ord_p(const kp_modulus* m, uint64_t x, uint32_t* out,
                                  int* infinite);
/* Jacobi symbol (x/p^n) in {-1, 0, +1} */
KLOOSTPATH_API kp_status kp_jacobi(const kp_modulus* m, uint64_t x, int* out);

/* ---- square-root branch ---- */
KLOOSTPATH_API kp_status kp_branch_create_default(const kp_modulus* m, kp_branch** out);
/* choice[r] for r in [0, p) must square to r mod p on residue classes */
KLOOSTPATH_API kp_status kp_branch_create(const kp_modulus* m, const uint64_t* choice,
                                          size_t len, kp_branch** out);
KLOOSTPATH_API void kp_branch_free(kp_branch* br);
KLOOSTPATH_API kp_status kp_sqrt_branch(kp_branch* br, uint64_t x, uint64_t* out);

/* ---- Kloosterman sums ---- */
KLOOSTPATH_API kp_status kp_kloosterman_naive(const kp_modulus* m, uint64_t a,
                                              uint64_t b, double* re, double* im);
KLOOSTPATH_API kp_status kp_kloosterman_closed(const kp_modulus* m, kp_branch* br,
                                               uint64_t a, uint64_t b, double* out);
KLOOSTPATH_API kp_status kp_summand_census(const kp_modulus* m, uint64_t a, uint64_t b,
                                           uint64_t* distinct, uint64_t* total);
/* pass = 1 when every count in the targeted classes equals 2 p^kappa */
KLOOSTPATH_API kp_status kp_multiplicity_check(const kp_modulus* m, uint32_t kappa,
                                               int* pass, uint64_t* expected,
                                               uint64_t* classes_checked);

/* ---- paths ---- */
typedef enum kp_path_variant {
    KP_PATH_STANDARD = 0,
    KP_PATH_RENORMALIZED = 1,
    KP_PATH_REARRANGED = 2
} kp_path_variant;

typedef enum kp_path_format {
    KP_FORMAT_CSV = 0,
    KP_FORMAT_JSON = 1,
    KP_FORMAT_SVG = 2
} kp_path_format;

KLOOSTPATH_API kp_status kp_path_create(const kp_modulus* m, uint64_t a, uint64_t b,
                                        kp_path_variant variant, kp_path** out);
KLOOSTPATH_API void kp_path_free(kp_path* path);
KLOOSTPATH_API kp_status kp_path_vertex_count(const kp_path* path, size_t* out);
KLOOSTPATH_API kp_status kp_path_vertex(const kp_path* path, size_t index, double* re,
                                        double* im);
KLOOSTPATH_API kp_status kp_path_eval(const kp_path* path, double t, double* re,
                                      double* im);
/* serialize into a malloc'd buffer (release with kp_string_free) */
KLOOSTPATH_API kp_status kp_path_export(const kp_path* path, kp_path_format format,
                                        char** out);
KLOOSTPATH_API kp_status kp_path_export_file(const kp_path* path, kp_path_format format,
                                             const char* filename);

/* ---- completion coefficients ---- */
KLOOSTPATH_API kp_status kp_completion_alpha(const kp_modulus* m, double t, int64_t h,
                                             double* re, double* im);
KLOOSTPATH_API kp_status kp_completion_beta(double t, int64_t h, double* re, double* im);
KLOOSTPATH_API kp_status kp_completion_residual(const kp_modulus* m, kp_branch* br,
                                                uint64_t a, uint64_t b, double t,
                                                double* out);

/* ---- ensemble statistics ---- */
KLOOSTPATH_API kp_status kp_equidist_ks(const kp_modulus* m, kp_branch* br, uint64_t a1,
                                        uint64_t b0, double* ks, int* degenerate);
/* mu is given as parallel arrays tau[i] -> mult[i] */
KLOOSTPATH_API kp_status kp_sum_of_products(const kp_modulus* m, kp_branch* br,
                                            const uint64_t* tau, const uint32_t* mult,
                                            size_t len, uint64_t a1, uint64_t b0,
                                            double* out);
KLOOSTPATH_API kp_status kp_domain_count(const kp_modulus* m, const uint64_t* tau,
                                         size_t len, uint64_t b0, uint64_t* exact,
                                         double* predicted);

/* ---- experiments: JSON in, JSON out (release with kp_string_free) ---- */
KLOOSTPATH_API kp_status kp_experiment_run(const char* config_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* KLOOSTPATH_H */
