#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "tlra/generate.hpp"
#include "tlra/matrix_approx.hpp"
#include "tlra/tensor_cur.hpp"

using namespace tlra;

namespace {

// Index sets through the sampled-pivot search on the unfoldings.
struct Cur3Sets {
    std::vector<int> i1, i2, i3;
};

Cur3Sets pick_sets3(const Tensor& t, int k, std::uint64_t seed) {
    Cur3Sets sets;
    sets.i1 = pivot_search(unfold(t, 0), std::min(k * k, t.dim(0)), 400,
                           PivotObjective::sigma_product, seed)
                  .rows;
    sets.i2 = pivot_search(unfold(t, 1), k, 400, PivotObjective::sigma_product, seed + 1)
                  .rows;
    sets.i3 = pivot_search(unfold(t, 2), k, 400, PivotObjective::sigma_product, seed + 2)
                  .rows;
    return sets;
}

double dense_error(const Tensor& t, const Tensor& b) {
    Tensor diff = t;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= b[i];
    return hs_norm(diff);
}

}  // namespace

TEST_CASE("cur3 matches the nested skeleton composition oracle") {
    const Tensor t = generate("composite-cur(6x6x6,2,11)");
    const Cur3Sets sets = pick_sets3(t, 2, 21);
    const Cur3Factors f = cur3_build(t, sets.i1, sets.i2, sets.i3, 2);
    const Tensor via_oracle = oracle::cur3_composition(t, sets.i1, sets.i2, sets.i3);
    const Tensor via_factors = cur3_dense(f);
    CHECK(dense_error(via_oracle, via_factors) < 1e-9 * hs_norm(t));
}

TEST_CASE("cur3 storage matches the closed-form count") {
    const Tensor t = generate("composite-cur(7x6x5,2,12)");
    const Cur3Sets sets = pick_sets3(t, 2, 22);
    const Cur3Factors f = cur3_build(t, sets.i1, sets.i2, sets.i3, 2);
    const std::size_t k = 2;
    CHECK(f.storage_count() == k * k * 7 + k * k * k * (6 + 5) + 2 * k * k * k * k);
}

TEST_CASE("cur3 reconstructs structured tensors exactly") {
    // k = 1 on a rank-one tensor
    const Tensor t1 = generate("composite-cur(5x4x6,1,13)");
    const Cur3Sets s1 = pick_sets3(t1, 1, 23);
    const Cur3Factors f1 = cur3_build(t1, s1.i1, s1.i2, s1.i3, 1);
    CHECK(dense_error(t1, cur3_dense(f1)) < 1e-8 * hs_norm(t1));

    // k = 2 on a composite-structured 6x6x6 seed
    const Tensor t2 = generate("composite-cur(6x6x6,2,14)");
    const Cur3Sets s2 = pick_sets3(t2, 2, 24);
    const Cur3Factors f2 = cur3_build(t2, s2.i1, s2.i2, s2.i3, 2);
    CHECK(dense_error(t2, cur3_dense(f2)) < 1e-8 * hs_norm(t2));

    // sampled fibers are interpolated exactly: entries at (i1, a2, a3)
    for (int i1 = 0; i1 < t2.dim(0); ++i1)
        for (int a2 : s2.i2)
            for (int a3 : s2.i3)
                CHECK(cur3_entry(f2, i1, a2, a3) ==
                      doctest::Approx(t2.at({i1, a2, a3})).epsilon(1e-7));
}

TEST_CASE("cur3 rejects shape and pivot problems") {
    const Tensor t = oracle::random_tensor({5, 4, 4}, 31);
    CHECK_THROWS_AS(cur3_build(t, {0, 1, 2}, {0, 1}, {0, 1}, 2), DimensionError);
    CHECK_THROWS_AS(cur3_build(t, {0, 1, 2, 3}, {0}, {0, 1}, 2), DimensionError);

    // zero tensor has singular pivots everywhere
    const Tensor zero({4, 4, 4});
    CHECK_THROWS_AS(cur3_build(zero, {0, 1, 2, 3}, {0, 1}, {0, 1}, 2),
                    SingularPivotError);
    try {
        cur3_build(zero, {0, 1, 2, 3}, {0, 1}, {0, 1}, 2);
    } catch (const SingularPivotError& e) {
        CHECK(std::string(e.what()).find("T1(T)[I1,J]") != std::string::npos);
    }

    // with the pseudoinverse escape hatch the zero tensor evaluates to zero
    const Cur3Factors f = cur3_build(zero, {0, 1, 2, 3}, {0, 1}, {0, 1}, 2, true);
    CHECK(cur3_entry(f, 1, 2, 3) == 0.0);
    CHECK(hs_norm(cur3_dense(f)) == 0.0);

    CHECK_THROWS_AS(cur3_entry(f, 4, 0, 0), DimensionError);
}

TEST_CASE("cur3 container round trip") {
    const Tensor t = generate("composite-cur(6x5x4,2,15)");
    const Cur3Sets sets = pick_sets3(t, 2, 25);
    const Cur3Factors f = cur3_build(t, sets.i1, sets.i2, sets.i3, 2);

    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    save_cur3(buf, f);
    const Cur3Factors g = load_cur3(buf);
    CHECK(g.k == f.k);
    CHECK(g.shape == f.shape);
    CHECK(g.i1 == f.i1);
    CHECK(g.i2 == f.i2);
    CHECK(g.i3 == f.i3);
    CHECK((g.fibers1 - f.fibers1).norm() == 0.0);
    CHECK((g.f_core - f.f_core).norm() == 0.0);
    for (int a = 0; a < t.dim(0); ++a)
        for (int b = 0; b < t.dim(1); ++b)
            for (int c = 0; c < t.dim(2); ++c)
                CHECK(cur3_entry(g, a, b, c) == cur3_entry(f, a, b, c));
}

TEST_CASE("cur4 reconstructs a rank-one seed and counts storage") {
    const Tensor t = generate("composite-cur(4x4x4x4,1,16)");
    const auto p1 = pivot_search(unfold(t, 0), 1, 64, PivotObjective::sigma_product, 1);
    const auto p2 = pivot_search(unfold(t, 1), 1, 64, PivotObjective::sigma_product, 2);
    const auto p3 = pivot_search(unfold(t, 2), 1, 64, PivotObjective::sigma_product, 3);
    const auto p4 = pivot_search(unfold(t, 3), 1, 64, PivotObjective::sigma_product, 4);
    const Cur4Factors f = cur4_build(t, p1.rows, p2.rows, p3.rows, p4.rows, 1);
    CHECK(dense_error(t, cur4_dense(f)) < 1e-8 * hs_norm(t));
    CHECK(f.storage_count() == 1u * (4 + 4 + 4 + 4 + 3));

    // storage law for k = 2 on a 5x4x4x5 seed
    const Tensor t2 = generate("composite-cur(5x4x4x5,2,17)");
    const auto q1 = pivot_search(unfold(t2, 0), 2, 256, PivotObjective::sigma_product, 5);
    const auto q2 = pivot_search(unfold(t2, 1), 2, 256, PivotObjective::sigma_product, 6);
    const auto q3 = pivot_search(unfold(t2, 2), 2, 256, PivotObjective::sigma_product, 7);
    const auto q4 = pivot_search(unfold(t2, 3), 2, 256, PivotObjective::sigma_product, 8);
    const Cur4Factors f2 = cur4_build(t2, q1.rows, q2.rows, q3.rows, q4.rows, 2);
    CHECK(f2.storage_count() == 8u * (5 + 4 + 4 + 5 + 6));
    CHECK(dense_error(t2, cur4_dense(f2)) < 1e-8 * hs_norm(t2));
}

TEST_CASE("cur4 zero factors evaluate to zero") {
    const Tensor zero({3, 3, 3, 3});
    const Cur4Factors f =
        cur4_build(zero, {0}, {0}, {0}, {0}, 1, /*allow_pseudo_inverse=*/true);
    CHECK(cur4_entry(f, 2, 1, 0, 2) == 0.0);
    CHECK(hs_norm(cur4_dense(f)) == 0.0);
}

TEST_CASE("cur4 container round trip") {
    const Tensor t = generate("composite-cur(4x4x4x4,1,18)");
    const Cur4Factors f = cur4_build(t, {1}, {2}, {0}, {3}, 1, true);
    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    save_cur4(buf, f);
    const Cur4Factors g = load_cur4(buf);
    CHECK(g.shape == f.shape);
    CHECK(g.i3 == f.i3);
    CHECK((g.h_core - f.h_core).norm() == 0.0);
    CHECK(cur4_entry(g, 3, 2, 1, 0) == cur4_entry(f, 3, 2, 1, 0));
}
