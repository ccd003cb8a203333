#include "stochy/sparse.hpp"

#include <doctest.h>

using namespace stochy;

TEST_CASE("triplets are sorted and duplicates merged") {
    const auto m = CsrMatrix::from_triplets(3, 3, {{2, 0, 0.5}, {0, 2, 0.25}, {0, 1, 0.5}, {0, 2, 0.25}, {2, 0, 0.5}});
    CHECK(m.nnz() == 3);
    CHECK(m.row_ptr == std::vector<std::size_t>{0, 2, 2, 3});
    CHECK(m.at(0, 2) == 0.5);
    CHECK(m.at(2, 0) == 1.0);
    CHECK(m.at(1, 1) == 0.0);
    CHECK(m.row_sum(0) == 1.0);
    CHECK(m.row_cols(0)[0] == 1);
}

TEST_CASE("dense and row construction agree") {
    const std::vector<std::vector<double>> dense{{0.5, 0.0, 0.5}, {0.0, 1.0, 0.0}, {0.0, 0.0, 0.0}};
    const auto a = CsrMatrix::from_dense(dense);
    const auto b = CsrMatrix::from_rows(3, {{{0, 0.5}, {2, 0.5}}, {{1, 1.0}}, {}});
    CHECK(a == b);
}

TEST_CASE("interval matrices store bounds per entry") {
    const auto m = IntervalMatrix::from_rows(3, {{{0, 0.1, 0.4}, {2, 0.5, 0.9}}, {}, {{1, 1.0, 1.0}}});
    CHECK(m.nnz() == 3);
    CHECK(m.at(0, 2).low == 0.5);
    CHECK(m.at(0, 2).high == 0.9);
    CHECK(m.at(1, 1).high == 0.0);
    CHECK(m.row(0).size() == 2);
    const auto p = IntervalMatrix::from_points(CsrMatrix::from_dense({{0.3, 0.7}, {1.0, 0.0}}));
    CHECK(p.at(0, 1).low == 0.7);
    CHECK(p.at(0, 1).high == 0.7);
}
