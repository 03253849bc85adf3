#include "kfree/constructions.hpp"
#include "kfree/errors.hpp"
#include "kfree/summatory.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace kfree;

namespace {

int chi3(std::uint64_t n)
{
    return n % 3 == 0 ? 0 : (n % 3 == 1 ? 1 : -1);
}

long long enumerate_sum(std::uint64_t x, auto f)
{
    long long s = 0;
    for (std::uint64_t n = 1; n <= x; ++n)
        s += f(n);
    return s;
}

} // namespace

TEST_CASE("checkpoint schedule")
{
    const auto pts = CheckpointSchedule::geometric().points(1000);
    CHECK(pts.front() == 1);
    CHECK(pts.back() == 1000);
    CHECK(std::is_sorted(pts.begin(), pts.end()));
    CHECK(std::adjacent_find(pts.begin(), pts.end()) == pts.end());
    for (std::uint64_t p : {1ULL, 10ULL, 100ULL, 1000ULL})
        CHECK(std::find(pts.begin(), pts.end(), p) != pts.end());
    // 10, 11 (ceil 10.5), 12 (ceil 11.55), 13 (ceil 12.6)
    CHECK(pts[1] == 10);
    CHECK(pts[2] == 11);
    CHECK(pts[3] == 12);
    CHECK(pts[4] == 13);
    CHECK(CheckpointSchedule::explicit_points({5, 3, 3, 50}).points(20) == std::vector<std::uint64_t>{3, 5, 20});
    CHECK_THROWS_AS(CheckpointSchedule::geometric(1.0), ValidationError);
}

TEST_CASE("direct_summatory examples")
{
    const auto chi = build_real_character(3);
    const auto sched = CheckpointSchedule::geometric();
    const auto f = MultiplicativeRule::character(chi).restricted_to_kfree(2);
    CHECK(direct_summatory(f, 10, sched).final_value() == 1);
    CHECK(enumerate_sum(10, [](auto n) { return oracle::kfree(n, 2) * chi3(n); }) == 1);
    CHECK(direct_summatory(MultiplicativeRule::mobius(), 10, sched).final_value() == -1);
    CHECK(direct_summatory(MultiplicativeRule::constant_one(), 1'000'000, sched).final_value() == 1'000'000);
    CHECK_THROWS_AS(direct_summatory(f, 0, sched), RangeError);
    SummationOptions small;
    small.max_limit = 1000;
    CHECK_THROWS_AS(direct_summatory(f, 1001, sched, small), CapacityError);
}

TEST_CASE("series invariants and running max over every t")
{
    const auto chi = build_real_character(5);
    const auto f = MultiplicativeRule::character(chi).restricted_to_kfree(3);
    const auto s = direct_summatory(f, 100'000, CheckpointSchedule::geometric());
    long long m = 0, running = 0;
    std::size_t idx = 0;
    const int table[5] = {0, 1, -1, -1, 1};
    for (std::uint64_t n = 1; n <= 100'000 && idx < s.checkpoints.size(); ++n) {
        m += oracle::kfree(n, 3) * table[n % 5];
        running = std::max(running, std::abs(m));
        if (s.checkpoints[idx].x == n) {
            REQUIRE(s.checkpoints[idx].m == m);
            REQUIRE(s.checkpoints[idx].abs_max == running);
            ++idx;
        }
    }
    CHECK(idx == s.checkpoints.size());
    for (std::size_t i = 1; i < s.checkpoints.size(); ++i) {
        CHECK(s.checkpoints[i].x > s.checkpoints[i - 1].x);
        CHECK(s.checkpoints[i].abs_max >= s.checkpoints[i - 1].abs_max);
    }
    CHECK(s.at(100'000) == s.final_value());
    CHECK_THROWS_AS(s.at(99'999), RangeError);
}

TEST_CASE("schedule and segmentation independence")
{
    const auto chi = build_real_character(3);
    const auto f = MultiplicativeRule::character(chi).restricted_to_kfree(2);
    const std::uint64_t x = 3'000'000;
    const auto a = direct_summatory(f, x, CheckpointSchedule::geometric(1.05));
    const auto b = direct_summatory(f, x, CheckpointSchedule::geometric(1.3));
    for (const auto& c : b.checkpoints) {
        const auto it = std::find_if(a.checkpoints.begin(), a.checkpoints.end(),
                                     [&](const Checkpoint& d) { return d.x == c.x; });
        if (it != a.checkpoints.end()) {
            CHECK(it->m == c.m);
            CHECK(it->abs_max == c.abs_max);
        }
    }
    SummationOptions s16, s20;
    s16.segment_size = 1 << 16;
    s20.segment_size = 1 << 20;
    const auto c16 = direct_summatory(f, x, CheckpointSchedule::geometric(), s16);
    const auto c20 = direct_summatory(f, x, CheckpointSchedule::geometric(), s20);
    CHECK(c16.checkpoints.size() == c20.checkpoints.size());
    bool same = true;
    for (std::size_t i = 0; i < c16.checkpoints.size(); ++i)
        same = same && c16.checkpoints[i].x == c20.checkpoints[i].x && c16.checkpoints[i].m == c20.checkpoints[i].m &&
               c16.checkpoints[i].abs_max == c20.checkpoints[i].abs_max;
    CHECK(same);
}

TEST_CASE("mertens examples and both paths")
{
    CHECK(mertens(1) == 1);
    CHECK(mertens(10) == -1);
    CHECK(enumerate_sum(10, [](auto n) { return oracle::mobius(n); }) == -1);
    CHECK(mertens_recursive(1) == 1);
    CHECK(mertens_recursive(2) == 0);
    CHECK(mertens_recursive(10) == -1);
    for (std::uint64_t x : {1000ULL, 10'000ULL, 100'000ULL, 1'000'000ULL})
        CHECK(mertens(x) == mertens_recursive(x));
    CHECK(mertens(1'000'000) == 212);
    for (std::uint64_t x = 1; x <= 300; ++x)
        REQUIRE(mertens_recursive(x) == enumerate_sum(x, [](auto n) { return oracle::mobius(n); }));
    CHECK_THROWS_AS(mertens_recursive(100'000'000'001ULL), CapacityError);
}

TEST_CASE("summatory_mu_chi examples")
{
    const auto chi = build_real_character(3);
    const auto sched = CheckpointSchedule::geometric();
    CHECK(summatory_mu_chi(chi, 3, sched).final_value() == 2);
    CHECK(summatory_mu_chi(chi, 1, sched).final_value() == 1);
    const auto big = summatory_mu_chi(chi, 1'000'000, sched);
    CHECK(std::abs(static_cast<double>(big.final_value())) < std::pow(1e6, 0.6));
    CHECK(big.final_value() == enumerate_sum(1'000'000, [](auto n) { return oracle::mobius(n) * chi3(n); }));
}

TEST_CASE("series csv")
{
    const auto s = direct_summatory(MultiplicativeRule::mobius(), 10, CheckpointSchedule::geometric());
    std::ostringstream out;
    write_series_csv(s, out);
    CHECK(out.str() == "x,M,abs_max\n1,1,1\n10,-1,2\n");
}

TEST_CASE("oracles")
{
    const auto mu = sieve_mobius_segment(1, 100);
    const TableOracle t(mu);
    CHECK(t.limit() == 100);
    CHECK(t.partial_sum(0) == 0);
    CHECK(t.partial_sum(10) == -1);
    CHECK(t.value(30) == -1);
    CHECK_THROWS_AS(t.partial_sum(101), MissingArgumentError);

    const auto g = theorem2_g(build_real_character(3));
    const auto from_rule = TableOracle::from_rule(g, 5000, 1000);
    const auto table = tabulate(g, 1, 5000);
    long long s = 0;
    for (std::uint64_t n = 1; n <= 5000; ++n) {
        s += table(n);
        REQUIRE(from_rule.partial_sum(n) == s);
        REQUIRE(from_rule.value(n) == table(n));
    }

    const auto h = closed_form_h_oracle(2, g, 1000);
    CHECK(h.limit() >= 1000);
    const auto ht = closed_form_h(2, g, 1000);
    long long hs = 0;
    for (std::uint64_t n = 1; n <= 1000; ++n) {
        hs += ht(n);
        REQUIRE(h.partial_sum(n) == hs);
        REQUIRE(h.value(n) == ht(n));
    }
    CHECK(h.next_support(5) == 9);
    CHECK(h.next_support(9) == 9);
}

TEST_CASE("hyperbola split construction")
{
    const auto s = theorem2_split(32, 2);
    CHECK(s.u_floor == 16);
    CHECK(s.v_floor == 2);
    const auto t = theorem2_split(10'000'000'000ULL, 2);
    CHECK(t.u_floor == 100'000'000);
    CHECK(t.v_floor == 100);
    const auto r = theorem2_split(128, 3);
    CHECK(r.v_floor == 2);
    CHECK(r.u_floor == 64);
    CHECK(std::abs(r.u - std::pow(128.0, 6.0 / 7.0)) < 1e-9);
    const auto b = HyperbolaSplit::balanced(10'000);
    CHECK(b.u_floor == 100);
    CHECK(b.v_floor == 100);
    CHECK_THROWS_AS(HyperbolaSplit::from_reals(100, 5, 5), ValidationError);
    CHECK_THROWS_AS(HyperbolaSplit::from_reals(100, 0.5, 200), ValidationError);
    CHECK_THROWS_AS(HyperbolaSplit::from_floors(100, 5, 5), ValidationError);
    CHECK(HyperbolaSplit::from_floors(100, 10, 9).u_floor == 10);
}

TEST_CASE("hyperbola_sum degenerate cases")
{
    const std::uint64_t x = 2000;
    const auto chi = build_real_character(3);
    const auto g = theorem2_g(chi);
    const TableOracle go(tabulate(g, 1, x));
    const auto ho = closed_form_h_oracle(2, g, x);
    const auto f_direct = direct_summatory(g.restricted_to_kfree(2), x, CheckpointSchedule::geometric()).final_value();
    CHECK(hyperbola_sum(ho, go, HyperbolaSplit::from_reals(x, x, 1)) == f_direct);

    DenseValueTable eps;
    eps.lo = 1;
    eps.hi = x;
    eps.values.assign(x, 0);
    eps.values[0] = 1;
    const TableOracle eo(eps);
    for (double u : {1.0, 7.0, 44.7, 2000.0})
        CHECK(hyperbola_sum(eo, go, HyperbolaSplit::from_reals(x, u, x / u)) == go.partial_sum(x));

    const TableOracle short_g(tabulate(g, 1, 100));
    CHECK_THROWS_AS(hyperbola_sum(ho, short_g, HyperbolaSplit::balanced(x)), MissingArgumentError);
}

TEST_CASE("hyperbola equals direct for random rules and splits")
{
    std::mt19937_64 rng(2024);
    const std::uint64_t x = 10'000;
    const auto primes = sieve_primes(200);
    for (int trial = 0; trial < 20; ++trial) {
        const std::uint64_t q = trial % 2 == 0 ? 3 : 5;
        const unsigned k = 2 + static_cast<unsigned>(trial % 3);
        auto plan = ModificationPlan::empty(build_real_character(q), rng() % 2 == 0);
        for (auto p : primes)
            if (q % p != 0 && rng() % 4 == 0)
                plan.flipped_primes.push_back(p);
        const auto g = modified_g(plan);
        const auto f = g.restricted_to_kfree(k);
        const auto direct = direct_summatory(f, x, CheckpointSchedule::explicit_points({x})).final_value();

        // h = f * g^-1 from dense tables, independent of closed_form_h
        const auto gt = tabulate(g, 1, x);
        std::vector<long long> gv(x + 1), fv(x + 1);
        for (std::uint64_t n = 1; n <= x; ++n) {
            gv[n] = gt(n);
            fv[n] = tabulate(f, n, n)(n);
        }
        const auto ginv = dirichlet_inverse(gt);
        std::vector<long long> giv(x + 1);
        for (std::uint64_t n = 1; n <= x; ++n)
            giv[n] = ginv(n);
        const auto hv = oracle::convolve(fv, giv);
        ConvolutionTable h_table;
        h_table.limit = x;
        h_table.values.assign(hv.begin() + 1, hv.end());
        const TableOracle h_dense(h_table);
        const TableOracle g_dense(gt);

        std::uniform_real_distribution<double> logu(0.0, std::log(static_cast<double>(x)));
        for (int s = 0; s < 5; ++s) {
            const double u = std::exp(logu(rng));
            const auto split = HyperbolaSplit::from_reals(x, u, static_cast<double>(x) / u);
            CAPTURE(trial);
            CAPTURE(u);
            CHECK(hyperbola_sum(h_dense, g_dense, split) == direct);
            CHECK(hyperbola_sum(closed_form_h_oracle(k, g, x), g_dense, split) == direct);
        }
    }
}
