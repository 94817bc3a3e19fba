#include <doctest.h>

#include "aniso/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace aniso;

namespace {

// Twice the signed area in units of 2^-2k, exact for coordinates on the 2^-k grid.
long long scaled_area2(const Point& a, const Point& b, const Point& c, int k) {
    const double s = std::ldexp(1.0, k);
    const long long ax = std::llround(a[0] * s), ay = std::llround(a[1] * s);
    const long long bx = std::llround(b[0] * s), by = std::llround(b[1] * s);
    const long long cx = std::llround(c[0] * s), cy = std::llround(c[1] * s);
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

std::vector<double> fingerprint(const TaggedSimplex& s) {
    std::vector<double> e;
    for (int i = 0; i <= s.dim; ++i)
        for (int j = i + 1; j <= s.dim; ++j) e.push_back(std::pow(distance(s.vertices[i], s.vertices[j]), 2));
    const double m = *std::max_element(e.begin(), e.end());
    for (double& v : e) v = std::round(v / m * 1e9) / 1e9;
    std::sort(e.begin(), e.end());
    return e;
}

std::vector<TaggedSimplex> uniform_descendants(const TaggedSimplex& root, int generations) {
    std::vector<TaggedSimplex> level{root};
    for (int g = 0; g < generations; ++g) {
        std::vector<TaggedSimplex> next;
        for (const auto& s : level) {
            auto [a, b] = bisect_simplex(s);
            next.push_back(a);
            next.push_back(b);
        }
        level = std::move(next);
    }
    return level;
}

}  // namespace

TEST_CASE("interval bisection keeps half-open children") {
    TimeInterval root{0.0, 1.0, true, 0, 0, std::nullopt};
    auto [l, r] = bisect_interval(root);
    CHECK(l.lo == 0.0);
    CHECK(l.hi == 0.5);
    CHECK_FALSE(l.right_closed);
    CHECK(r.lo == 0.5);
    CHECK(r.hi == 1.0);
    CHECK(r.right_closed);
    CHECK(l.level == 1);
    CHECK(r.level == 1);
    CHECK(*l.parent == 0);

    auto [ll, lr] = bisect_interval(l);
    CHECK(ll.hi == 0.25);
    CHECK_FALSE(ll.right_closed);
    CHECK_FALSE(lr.right_closed);

    // four disjoint pieces of [0,1]: every probe lies in exactly one
    auto [rl, rr] = bisect_interval(r);
    const std::vector<TimeInterval> pieces{ll, lr, rl, rr};
    for (double t : {0.0, 0.1, 0.25, 0.5, 0.625, 0.75, 0.99, 1.0}) {
        int hits = 0;
        for (const auto& p : pieces) hits += p.contains(t);
        CHECK(hits == 1);
    }
}

TEST_CASE("interval lengths follow the level exactly") {
    TimeInterval cur{0.0, 3.0, true, 0, 0, std::nullopt};
    for (int n = 1; n <= 40; ++n) {
        cur = bisect_interval(cur).second;
        CHECK(cur.length() == std::ldexp(3.0, -n));
        CHECK(cur.level == n);
    }
}

TEST_CASE("segment bisection splits at the midpoint") {
    const TaggedSimplex s = make_simplex(1, {Point{0.25, 0, 0}, Point{1.0, 0, 0}}, 1);
    auto [a, b] = bisect_simplex(s);
    CHECK(a.vertices[0][0] == 0.25);
    CHECK(a.vertices[1][0] == 0.625);
    CHECK(b.vertices[0][0] == 1.0);
    CHECK(b.vertices[1][0] == 0.625);
    CHECK(a.tag == 1);
    CHECK(simplex_measure(a) == simplex_measure(s) / 2);
}

TEST_CASE("Kuhn triangle bisection matches an exact integer oracle") {
    const TaggedSimplex s = make_simplex(2, {Point{0, 0, 0}, Point{1, 0, 0}, Point{1, 1, 0}}, 2);
    auto [a, b] = bisect_simplex(s);
    const long long whole = std::llabs(scaled_area2(s.vertices[0], s.vertices[1], s.vertices[2], 1));
    const long long ca = std::llabs(scaled_area2(a.vertices[0], a.vertices[1], a.vertices[2], 1));
    const long long cb = std::llabs(scaled_area2(b.vertices[0], b.vertices[1], b.vertices[2], 1));
    CHECK(ca * 2 == whole);
    CHECK(cb * 2 == whole);
    CHECK(simplex_measure(a) == 0.25);
    CHECK(simplex_measure(b) == 0.25);
    // children lie on opposite sides of the line x1 z, inside the parent
    const Point z{0.5, 0.5, 0};
    CHECK(a.vertices[2] == z);
    CHECK(b.vertices[2] == z);
    CHECK(orient2d(s.vertices[1], z, s.vertices[0]) == -orient2d(s.vertices[1], z, s.vertices[2]));
    // Maubach tags: tag 2 -> 1
    CHECK(a.tag == 1);
    CHECK(b.tag == 1);
    CHECK(a.vertices[0] == s.vertices[0]);
    CHECK(a.vertices[1] == s.vertices[1]);
    CHECK(b.vertices[0] == s.vertices[1]);
    CHECK(b.vertices[1] == s.vertices[2]);
}

TEST_CASE("degenerate simplices are rejected") {
    CHECK_THROWS_AS(make_simplex(2, {Point{0, 0, 0}, Point{1, 1, 0}, Point{2, 2, 0}}, 2), std::invalid_argument);
    CHECK_THROWS_AS(make_simplex(1, {Point{0.5, 0, 0}, Point{0.5, 0, 0}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_simplex(2, {Point{0, 0, 0}, Point{1, 0, 0}, Point{0, 1, 0}}, 3), std::invalid_argument);
}

TEST_CASE("shape constant of the unit equilateral triangle") {
    const TaggedSimplex s = make_simplex(2, {Point{0, 0, 0}, Point{1, 0, 0}, Point{0.5, std::sqrt(3.0) / 2, 0}}, 2);
    const double inradius_oracle = 1.0 / (2.0 * std::sqrt(3.0));
    CHECK(simplex_inradius(s) == doctest::Approx(inradius_oracle).epsilon(1e-14));
    CHECK(simplex_shape(s) == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-14));
    const TaggedSimplex seg = make_simplex(1, {Point{0, 0, 0}, Point{2, 0, 0}}, 1);
    CHECK(simplex_shape(seg) == doctest::Approx(2.0));
    const TaggedSimplex tet = make_simplex(3, {Point{0, 0, 0}, Point{1, 0, 0}, Point{1, 1, 0}, Point{1, 1, 1}}, 3);
    CHECK(simplex_measure(tet) == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("bisection halves the measure exactly and partitions the parent") {
    for (int d = 1; d <= 3; ++d) {
        std::vector<Point> v(d + 1, Point{});
        for (int i = 1; i <= d; ++i) {
            v[i] = v[i - 1];
            v[i][i - 1] = 1.0;
        }
        const TaggedSimplex root = make_simplex(d, v, d);
        for (const auto& s : uniform_descendants(root, 3 * d)) {
            auto [a, b] = bisect_simplex(s);
            CHECK(simplex_measure(a) == doctest::Approx(simplex_measure(s) / 2).epsilon(1e-15));
            CHECK(simplex_measure(b) == doctest::Approx(simplex_measure(s) / 2).epsilon(1e-15));
            // vertex sets: the union of the children's vertices is the parent's plus the midpoint
            std::set<Point> parent(s.vertices.begin(), s.vertices.begin() + d + 1);
            std::set<Point> kids(a.vertices.begin(), a.vertices.begin() + d + 1);
            kids.insert(b.vertices.begin(), b.vertices.begin() + d + 1);
            parent.insert(midpoint(s.vertices[0], s.vertices[s.tag]));
            CHECK(kids == parent);
        }
    }
}

TEST_CASE("descendants fall into finitely many similarity classes") {
    const std::vector<std::vector<Point>> roots2{{Point{0, 0, 0}, Point{1, 0, 0}, Point{1, 1, 0}},
                                                 {Point{0, 0, 0}, Point{1, 0, 0}, Point{0.3, 0.8, 0}}};
    for (const auto& v : roots2) {
        const TaggedSimplex root = make_simplex(2, v, 2);
        std::set<std::vector<double>> classes;
        for (int g = 0; g <= 4; ++g)
            for (const auto& s : uniform_descendants(root, g)) classes.insert(fingerprint(s));
        CHECK(classes.size() <= 2 * 4);
    }
    const TaggedSimplex tet = make_simplex(3, {Point{0, 0, 0}, Point{1, 0, 0}, Point{1, 1, 0}, Point{1, 1, 1}}, 3);
    std::set<std::vector<double>> classes;
    for (int g = 0; g <= 6; ++g)
        for (const auto& s : uniform_descendants(tet, g)) classes.insert(fingerprint(s));
    CHECK(classes.size() <= 3 * 8);
}

TEST_CASE("d generations of uniform bisection saturate every root edge") {
    for (int d = 1; d <= 3; ++d) {
        std::vector<Point> v(d + 1, Point{});
        for (int i = 1; i <= d; ++i) {
            v[i] = v[i - 1];
            v[i][i - 1] = 1.0;
        }
        const TaggedSimplex root = make_simplex(d, v, d);
        std::set<Point> created;
        for (const auto& s : uniform_descendants(root, d))
            for (int i = 0; i <= d; ++i) created.insert(s.vertices[i]);
        for (int i = 0; i <= d; ++i)
            for (int j = i + 1; j <= d; ++j) CHECK(created.count(midpoint(v[i], v[j])) == 1);
    }
}

TEST_CASE("diameter times 2^{l/d} stays bracketed over 20 levels") {
    const TaggedSimplex root = make_simplex(2, {Point{0, 0, 0}, Point{1, 0, 0}, Point{0.3, 0.8, 0}}, 2);
    double lo = 1e300, hi = 0.0;
    std::vector<TaggedSimplex> chain{root};
    TaggedSimplex cur = root;
    double kappa_max = simplex_shape(root);
    for (int l = 0; l <= 20; ++l) {
        const double scaled = simplex_diameter(cur) * std::exp2(l / 2.0);
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
        kappa_max = std::max(kappa_max, simplex_shape(cur));
        auto [a, b] = bisect_simplex(cur);
        cur = (l % 3 == 0) ? a : b;
    }
    CHECK(hi / lo < 4.0);
    CHECK(kappa_max / simplex_shape(root) < 8.0);
}

TEST_CASE("temporal split counts follow the anisotropy ratio") {
    AnisotropyParams p{1.0, 4.0, 2};
    for (int n = 1; n <= 10; ++n) CHECK(p.temporal_splits(n) == 2);
    AnisotropyParams iso{1.0, 1.0, 1};
    for (int n = 1; n <= 10; ++n) CHECK(iso.temporal_splits(n) == 1);
    AnisotropyParams half{2.0, 2.0, 2};  // s2/(s1 d) = 1/2
    for (int n = 1; n <= 10; ++n) CHECK(half.temporal_splits(n) == (n % 2 == 1 ? 1 : 0));
    AnisotropyParams third{3.0, 1.0, 1};  // ratio 1/3 is not dyadic
    int total = 0;
    for (int n = 1; n <= 9; ++n) total += third.temporal_splits(n);
    CHECK(total == 3);
    CHECK(third.interval_level(3) == 1);
    CHECK(AnisotropyParams{1.0, 2.0, 2}.rate_exponent() == doctest::Approx(0.5));
    CHECK_THROWS(AnisotropyParams{0.0, 1.0, 1}.check());
}

TEST_CASE("level size bracket") {
    const TimeInterval i0{0.0, 1.0, true, 0, 0, std::nullopt};
    const TaggedSimplex s0 = make_simplex(2, {Point{0, 0, 0}, Point{1, 0, 0}, Point{1, 1, 0}}, 2);
    RootSizes roots{1.0, 1.0, 0.5, 0.5, simplex_shape(s0)};

    SUBCASE("root prism") {
        const AnisotropyParams params{1.0, 2.0, 2};
        const SizeBracket b = level_size_bounds(i0, s0, 0, roots, params);
        CHECK(b.lower <= b.diameter);
        CHECK(b.diameter <= b.upper);
        CHECK(b.diameter == doctest::Approx(std::sqrt(3.0)));
    }
    SUBCASE("s2 = 2 s1 in d = 2: one temporal split per level") {
        const AnisotropyParams params{1.0, 2.0, 2};
        TimeInterval ivl = i0;
        TaggedSimplex s = s0;
        for (int l = 1; l <= 16; ++l) {
            for (int k = 0; k < params.temporal_splits(l); ++k) ivl = bisect_interval(ivl).first;
            s = bisect_simplex(s).second;
            CHECK(ivl.length() == std::ldexp(1.0, -l));
            CHECK(simplex_diameter(s) * std::exp2(l / 2.0) == doctest::Approx(simplex_diameter(s0)).epsilon(0.5));
            CHECK_NOTHROW(level_size_bounds(ivl, s, l, roots, params));
        }
    }
    SUBCASE("isotropic d = 1") {
        const AnisotropyParams params{1.0, 1.0, 1};
        const TaggedSimplex seg = make_simplex(1, {Point{0, 0, 0}, Point{1, 0, 0}}, 1);
        RootSizes r1{1.0, 1.0, 1.0, 1.0, simplex_shape(seg)};
        TimeInterval ivl = i0;
        TaggedSimplex s = seg;
        for (int l = 1; l <= 20; ++l) {
            ivl = bisect_interval(ivl).second;
            s = bisect_simplex(s).first;
            const SizeBracket b = level_size_bounds(ivl, s, l, r1, params);
            CHECK(b.diameter == doctest::Approx(std::sqrt(2.0) * std::ldexp(1.0, -l)));
        }
    }
    SUBCASE("a diameter outside the bracket is reported") {
        const AnisotropyParams params{1.0, 1.0, 2};
        CHECK_THROWS_AS(level_size_bounds(i0, s0, 30, roots, params), std::logic_error);
    }
}
