#include "discretediag/diagnose.hpp"
#include "discretediag/error.hpp"
#include "discretediag/simulate.hpp"

#include <doctest.h>

#include <algorithm>
#include <vector>

using namespace discretediag;

namespace
{
const std::vector<double> kP{0.25, 0.3, 0.45};
const std::vector<double> kQ{0.75, 0.05, 0.2};

SegmentSet dar_chains(std::uint64_t seed, std::vector<std::vector<double>> marginals, double phi, std::size_t n)
{
    auto rng = derive_stream(seed, 0);
    std::vector<Sequence> chains;
    for (const auto& p : marginals)
        chains.push_back(simulate_dar1(Dar1Params{p, phi}, n, rng));
    return SegmentSet(CategoryAlphabet::indexed(3), std::move(chains));
}

DiagnosticRequest request(Method method, Mode mode = Mode::Between)
{
    DiagnosticRequest req;
    req.method = method;
    req.mode = mode;
    req.bootstrap.replicates = 50;
    req.bootstrap.seed = 17;
    return req;
}
} // namespace

TEST_CASE("checkpoint grid")
{
    const auto grid = checkpoint_grid(10000, 20);
    REQUIRE(grid.size() == 20);
    for (std::size_t k = 0; k < 20; ++k)
        CHECK(grid[k] == 500 * (k + 1));
    CHECK(checkpoint_grid(7, 3) == std::vector<std::size_t>{2, 4, 7});
    CHECK_THROWS_AS(checkpoint_grid(100, 0), DataError);
}

TEST_CASE("between mode equals the underlying test")
{
    const auto chains = dar_chains(1, {kP, kP, kQ}, 0.5, 300);
    for (Method m : kAllMethods)
    {
        const auto req = request(m);
        const auto report = run_between(chains, req);
        REQUIRE(report.evaluations.size() == 1);
        const auto& ev = report.evaluations.front();
        CHECK(ev.unit == "all");
        CHECK_FALSE(ev.checkpoint.has_value());
        CHECK(ev.outcome == evaluate(chains, m, req.bootstrap));
        CHECK(ev.reject == (ev.outcome.p_value < req.alpha));
        CHECK(report.warnings.empty());
    }
}

TEST_CASE("between mode on the direct test functions")
{
    const auto chains = dar_chains(2, {kP, kQ}, 0.25, 200);
    auto req = request(Method::Hangartner);
    CHECK(run_between(chains, req).evaluations[0].outcome == hangartner_test(frequency_table(chains)));
    req.method = Method::Weiss;
    CHECK(run_between(chains, req).evaluations[0].outcome == weiss_test(chains));
    req.method = Method::Billingsley;
    CHECK(run_between(chains, req).evaluations[0].outcome == billingsley_test(transition_table(chains)));
    req.method = Method::McBoot;
    CHECK(run_between(chains, req).evaluations[0].outcome == mcboot_test(chains, req.bootstrap));
}

TEST_CASE("between mode power and null behaviour")
{
    const auto req = request(Method::Weiss);
    CHECK(run_between(dar_chains(3, {kP, kQ}, 0.0, 1000), req).evaluations[0].reject);
    int rejects = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed)
        rejects += run_between(dar_chains(100 + seed, {kP, kP, kP, kP, kP}, 0.5, 1000), req).evaluations[0].reject;
    CHECK(rejects <= 8);
}

TEST_CASE("between mode preconditions")
{
    const auto one = dar_chains(4, {kP}, 0.5, 100);
    CHECK_THROWS_WITH_AS(run_between(one, request(Method::Weiss)), "between mode needs >= 2 chains", DataError);
    auto req = request(Method::Weiss);
    req.alpha = 1.0;
    CHECK_THROWS_AS(run_between(dar_chains(4, {kP, kP}, 0.5, 100), req), DataError);
}

TEST_CASE("short segments add a low-power warning")
{
    const auto report = run_between(dar_chains(5, {kP, kP}, 0.5, 80), request(Method::Hangartner));
    REQUIRE(report.warnings.size() == 1);
    CHECK(report.warnings[0].find("low power") != std::string::npos);
}

TEST_CASE("within mode reports one outcome per chain")
{
    const auto chains = dar_chains(6, {kP, kP, kP}, 0.5, 1000);
    const auto req = request(Method::Weiss, Mode::Within);
    const auto report = run_within(chains, req);
    REQUIRE(report.evaluations.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
    {
        CHECK(report.evaluations[i].unit == chains.name(i));
        const auto windows = split_within(chains.segment(i), chains.alphabet(), 0.30);
        CHECK(windows.length(0) == 300);
        CHECK(report.evaluations[i].outcome == weiss_test(windows));
    }
    CHECK(report.mode == Mode::Within);
}

TEST_CASE("within mode detects a drifting chain")
{
    auto rng = derive_stream(7, 0);
    auto head = simulate_dar1(Dar1Params{kP, 0.0}, 5000, rng);
    auto tail = simulate_dar1(Dar1Params{kQ, 0.0}, 5000, rng);
    head.insert(head.end(), tail.begin(), tail.end());
    auto steady = simulate_dar1(Dar1Params{kP, 0.0}, 10000, rng);
    const SegmentSet chains(CategoryAlphabet::indexed(3), {head, steady}, {"drift", "steady"});
    const auto report = run_within(chains, request(Method::Weiss, Mode::Within));
    CHECK(report.evaluations[0].unit == "drift");
    CHECK(report.evaluations[0].reject);
    CHECK(report.evaluations[0].outcome.p_value < 1e-10);
}

TEST_CASE("within mode preconditions")
{
    auto req = request(Method::Weiss, Mode::Within);
    req.window_fraction = 0.6;
    CHECK_THROWS_AS(run_within(dar_chains(8, {kP}, 0.5, 100), req), DataError);

    const SegmentSet chains(CategoryAlphabet::indexed(2), {{0, 1, 0, 1, 0, 1, 0, 1, 0, 1}, {0, 1, 1}}, {"a", "b"});
    try
    {
        run_within(chains, request(Method::Hangartner, Mode::Within));
        FAIL("expected an error");
    }
    catch (const DataError& e)
    {
        CHECK(std::string(e.what()).find("chain b") != std::string::npos);
    }
}

TEST_CASE("sequential checkpoints")
{
    const auto chains = dar_chains(9, {kP, kP}, 0.5, 1000);
    auto req = request(Method::Hangartner);
    req.checkpoint_count = 10;
    const auto report = run_sequential(chains, req);
    CHECK(report.sequential);
    REQUIRE(report.evaluations.size() == 10);
    for (std::size_t k = 0; k < 10; ++k)
    {
        CHECK(report.evaluations[k].checkpoint == 100 * (k + 1));
        CHECK(report.evaluations[k].outcome == hangartner_test(frequency_table(prefix(chains, 100 * (k + 1)))));
    }
}

TEST_CASE("sequential final checkpoint equals between mode")
{
    const auto chains = dar_chains(10, {kP, kQ, kP}, 0.3, 600);
    for (Method m : kAllMethods)
    {
        auto req = request(m);
        req.checkpoint_count = 4;
        const auto seq = run_sequential(chains, req);
        CHECK(seq.evaluations.back().outcome == run_between(chains, req).evaluations[0].outcome);
    }
}

TEST_CASE("sequential skips short prefixes")
{
    const auto chains = dar_chains(11, {kP, kP}, 0.5, 400);
    auto req = request(Method::Hangartner);
    req.checkpoint_count = 20;  // 20, 40, 60, ...
    const auto report = run_sequential(chains, req);
    CHECK(report.evaluations.size() == 18);
    CHECK(report.evaluations.front().checkpoint == 60);
    CHECK(std::count_if(report.warnings.begin(), report.warnings.end(),
                        [](const std::string& w) { return w.find("skipped") != std::string::npos; }) == 2);

    req.checkpoints = {10, 20, 30};
    CHECK_THROWS_AS(run_sequential(chains, req), DataError);
    req.checkpoints = {100, 500};
    CHECK_THROWS_AS(run_sequential(chains, req), DataError);
    req.checkpoints = {300, 100, 300};
    const auto explicit_report = run_sequential(chains, req);
    REQUIRE(explicit_report.evaluations.size() == 2);
    CHECK(explicit_report.evaluations[0].checkpoint == 100);
}

TEST_CASE("sequential statistic is zero for identical chains")
{
    auto rng = derive_stream(12, 0);
    const auto x = simulate_dar1(Dar1Params{kP, 0.5}, 1000, rng);
    const SegmentSet chains(CategoryAlphabet::indexed(3), {x, x, x});
    auto req = request(Method::Weiss);
    for (const auto& ev : run_sequential(chains, req).evaluations)
        CHECK(ev.outcome.statistic == 0.0);
    req.method = Method::Billingsley;
    for (const auto& ev : run_sequential(chains, req).evaluations)
        CHECK(ev.outcome.statistic == 0.0);
}

TEST_CASE("sequential p-values fall below alpha for different models")
{
    const auto chains = dar_chains(13, {kP, kQ}, 0.5, 5000);
    auto req = request(Method::Weiss);
    req.checkpoint_count = 10;
    const auto report = run_sequential(chains, req);
    for (std::size_t k = 2; k < report.evaluations.size(); ++k)
        CHECK(report.evaluations[k].reject);
}

TEST_CASE("reports are deterministic and ignore the worker count")
{
    const auto chains = dar_chains(14, {kP, kP}, 0.5, 300);
    auto req = request(Method::DarBoot);
    const auto a = run_sequential(chains, req);
    req.bootstrap.parallelism = 4;
    const auto b = run_sequential(chains, req);
    CHECK(a == b);
    req.bootstrap.seed = 18;
    CHECK_FALSE(a == run_sequential(chains, req));
}
