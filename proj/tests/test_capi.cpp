// Surface tests for the extern-C shared-library API: handle lifecycles,
// error codes, value sanity, and experiment determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <kloostpath/kloostpath.h>

#include <cmath>
#include <cstring>
#include <string>

#include <json.hpp>

TEST_CASE("modulus lifecycle and validation") {
    kp_modulus* m = nullptr;
    REQUIRE(kp_modulus_create(3, 2, &m) == KP_OK);
    CHECK(kp_modulus_p(m) == 3);
    CHECK(kp_modulus_n(m) == 2);
    CHECK(kp_modulus_q(m) == 9);
    CHECK(kp_modulus_phi(m) == 6);
    kp_modulus_free(m);

    kp_modulus* bad = nullptr;
    CHECK(kp_modulus_create(4, 2, &bad) == KP_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(kp_last_error_message()) > 0);
    CHECK(kp_modulus_create(3, 60, &bad) == KP_ERR_OVERFLOW);
    CHECK(kp_modulus_create(3, 2, nullptr) == KP_ERR_INVALID_ARGUMENT);
}

TEST_CASE("ring operations through the C surface") {
    kp_modulus* m = nullptr;
    REQUIRE(kp_modulus_create(3, 3, &m) == KP_OK);

    uint64_t out = 0;
    CHECK(kp_mul_mod(m, 4, 7, &out) == KP_OK);
    CHECK(out == 1);
    CHECK(kp_mul_mod(m, 27, 1, &out) == KP_ERR_INVALID_ARGUMENT); // out of range

    CHECK(kp_inv_mod(m, 7, &out) == KP_OK);
    CHECK(out == 4);
    CHECK(kp_inv_mod(m, 9, &out) == KP_ERR_NOT_A_UNIT);

    uint32_t val = 0;
    int infinite = 0;
    CHECK(kp_ord_p(m, 18, &val, &infinite) == KP_OK);
    CHECK(val == 2);
    CHECK(infinite == 0);
    CHECK(kp_ord_p(m, 0, &val, &infinite) == KP_OK);
    CHECK(infinite == 1);

    int jac = 0;
    CHECK(kp_jacobi(m, 2, &jac) == KP_OK);
    CHECK(jac == -1);

    kp_modulus_free(m);
}

TEST_CASE("branch and square roots") {
    kp_modulus* m = nullptr;
    REQUIRE(kp_modulus_create(3, 2, &m) == KP_OK);
    kp_branch* br = nullptr;
    REQUIRE(kp_branch_create_default(m, &br) == KP_OK);

    uint64_t root = 0;
    CHECK(kp_sqrt_branch(br, 4, &root) == KP_OK);
    CHECK(root == 7);
    CHECK(kp_sqrt_branch(br, 2, &root) == KP_ERR_NOT_A_SQUARE);
    CHECK(kp_sqrt_branch(br, 3, &root) == KP_ERR_NOT_A_UNIT);

    // custom branch: s(1) = 2 picks the other root
    const uint64_t choice[3] = {0, 2, 0};
    kp_branch* other = nullptr;
    REQUIRE(kp_branch_create(m, choice, 3, &other) == KP_OK);
    CHECK(kp_sqrt_branch(other, 4, &root) == KP_OK);
    CHECK(root == 2);

    kp_branch_free(other);
    kp_branch_free(br);
    kp_modulus_free(m);
}

TEST_CASE("Kloosterman evaluations") {
    kp_modulus* m = nullptr;
    REQUIRE(kp_modulus_create(3, 2, &m) == KP_OK);
    kp_branch* br = nullptr;
    REQUIRE(kp_branch_create_default(m, &br) == KP_OK);

    double re = 0, im = 0, closed = 0;
    CHECK(kp_kloosterman_naive(m, 1, 1, &re, &im) == KP_OK);
    CHECK(re == doctest::Approx(0.3472963553338607));
    CHECK(std::abs(im) < 1e-12);
    CHECK(kp_kloosterman_closed(m, br, 1, 1, &closed) == KP_OK);
    CHECK(std::abs(re - closed) < 1e-10);
    CHECK(kp_kloosterman_closed(m, br, 2, 1, &closed) == KP_OK);
    CHECK(closed == 0.0);
    CHECK(kp_kloosterman_naive(m, 1, 3, &re, &im) == KP_ERR_NOT_A_UNIT);

    kp_modulus* shallow = nullptr;
    REQUIRE(kp_modulus_create(3, 1, &shallow) == KP_OK);
    kp_branch* br1 = nullptr;
    REQUIRE(kp_branch_create_default(shallow, &br1) == KP_OK);
    CHECK(kp_kloosterman_closed(shallow, br1, 1, 1, &closed) ==
          KP_ERR_UNSUPPORTED_DEPTH);
    kp_branch_free(br1);
    kp_modulus_free(shallow);

    uint64_t distinct = 0, total = 0;
    kp_modulus* m27 = nullptr;
    REQUIRE(kp_modulus_create(3, 3, &m27) == KP_OK);
    CHECK(kp_summand_census(m27, 1, 1, &distinct, &total) == KP_OK);
    CHECK(distinct == 4);
    CHECK(total == 18);

    int pass = 0;
    uint64_t expected = 0, checked = 0;
    kp_modulus* m35 = nullptr;
    REQUIRE(kp_modulus_create(3, 5, &m35) == KP_OK);
    CHECK(kp_multiplicity_check(m35, 1, &pass, &expected, &checked) == KP_OK);
    CHECK(pass == 1);
    CHECK(expected == 6);
    kp_modulus_free(m35);
    kp_modulus_free(m27);
    kp_branch_free(br);
    kp_modulus_free(m);
}

TEST_CASE("paths through the C surface") {
    kp_modulus* m = nullptr;
    REQUIRE(kp_modulus_create(3, 4, &m) == KP_OK);
    kp_path* path = nullptr;
    REQUIRE(kp_path_create(m, 1, 1, KP_PATH_STANDARD, &path) == KP_OK);

    size_t count = 0;
    CHECK(kp_path_vertex_count(path, &count) == KP_OK);
    CHECK(count == 54); // phi(81)

    double re = 0, im = 0;
    CHECK(kp_path_eval(path, 0.0, &re, &im) == KP_OK);
    CHECK(kp_path_eval(path, 2.0, &re, &im) == KP_ERR_INVALID_ARGUMENT);
    CHECK(kp_path_vertex(path, count, &re, &im) == KP_ERR_INVALID_ARGUMENT);

    char* json_text = nullptr;
    REQUIRE(kp_path_export(path, KP_FORMAT_JSON, &json_text) == KP_OK);
    auto doc = nlohmann::json::parse(json_text);
    CHECK(doc["vertices"].size() == count);
    kp_string_free(json_text);

    char* svg_text = nullptr;
    REQUIRE(kp_path_export(path, KP_FORMAT_SVG, &svg_text) == KP_OK);
    CHECK(std::string(svg_text).find("<polyline") != std::string::npos);
    kp_string_free(svg_text);

    // rearranged path needs n >= 3
    kp_modulus* shallow = nullptr;
    REQUIRE(kp_modulus_create(3, 2, &shallow) == KP_OK);
    kp_path* bad = nullptr;
    CHECK(kp_path_create(shallow, 1, 1, KP_PATH_REARRANGED, &bad) ==
          KP_ERR_UNSUPPORTED_DEPTH);
    kp_modulus_free(shallow);

    kp_path_free(path);
    kp_modulus_free(m);
}

TEST_CASE("completion and ensemble statistics") {
    kp_modulus* m = nullptr;
    REQUIRE(kp_modulus_create(3, 3, &m) == KP_OK);
    kp_branch* br = nullptr;
    REQUIRE(kp_branch_create_default(m, &br) == KP_OK);

    double re = 0, im = 0, residual = 1;
    CHECK(kp_completion_alpha(m, 0.5, 2, &re, &im) == KP_OK);
    CHECK(kp_completion_beta(0.5, 0, &re, &im) == KP_OK);
    CHECK(re == doctest::Approx(0.5));
    CHECK(kp_completion_residual(m, br, 1, 1, 0.5, &residual) == KP_OK);
    CHECK(residual < 1e-6);

    double ks = 0;
    int degenerate = 0;
    CHECK(kp_equidist_ks(m, br, 1, 1, &ks, &degenerate) == KP_OK);
    CHECK(degenerate == 0);
    CHECK(ks > 0.0);
    CHECK(ks < 1.0);

    const uint64_t tau[1] = {0};
    const uint32_t mult[1] = {2};
    double sop = 0;
    CHECK(kp_sum_of_products(m, br, tau, mult, 1, 1, 1, &sop) == KP_OK);
    CHECK(std::abs(sop - 0.5) < 0.2);

    uint64_t exact = 0;
    double predicted = 0;
    CHECK(kp_domain_count(m, tau, 1, 1, &exact, &predicted) == KP_OK);
    CHECK(exact == 9); // one good class mod 3, times 3^2

    kp_branch_free(br);
    kp_modulus_free(m);
}

TEST_CASE("experiment runner determinism") {
    const char* config =
        R"({"kind":"census","p":3,"n":3,"a":1,"b":1,"expected_distinct":4})";
    char* first = nullptr;
    char* second = nullptr;
    REQUIRE(kp_experiment_run(config, &first) == KP_OK);
    REQUIRE(kp_experiment_run(config, &second) == KP_OK);
    CHECK(std::string(first) == std::string(second)); // byte-identical
    auto doc = nlohmann::json::parse(first);
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["distinct"] == 4);
    CHECK(doc["spec"]["p"] == 3);
    kp_string_free(first);
    kp_string_free(second);

    char* bad = nullptr;
    CHECK(kp_experiment_run("not json", &bad) == KP_ERR_INVALID_ARGUMENT);
    CHECK(kp_experiment_run(R"({"kind":"nope"})", &bad) == KP_ERR_INVALID_ARGUMENT);
}
