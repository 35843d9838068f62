#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ttok/bench.hpp"
#include "ttok/error.hpp"

using namespace ttok;

namespace {

const TimeUnit kHour{TimeUnitKind::hour};
const TimeUnit kMonth{TimeUnitKind::month};

TokenizerSpec spec_with(StrategyParams p, TimeUnit unit = kHour) {
    TokenizerSpec s;
    s.unit = unit;
    s.params = std::move(p);
    return s;
}

}  // namespace

TEST_CASE("tokens per value") {
    CHECK(tokens_per_value(spec_with(ByteParams{})).value == 4);
    CHECK_FALSE(tokens_per_value(spec_with(ByteParams{})).estimate);
    const auto num = tokens_per_value(spec_with(NumericParams{6}));
    CHECK(num.value == 4);
    CHECK(num.estimate);
    CHECK(tokens_per_value(spec_with(CalAbsParams{{ResolutionKind::day}, 2000, 2001})).value == 3);
    CHECK(tokens_per_value(spec_with(CalRelParams{{ResolutionKind::second}})).value == 6);
    CHECK(tokens_per_value(spec_with(BinSpec{ScaleKind::linear(), 256, 0, 1})).value == 1);
    RsqSpec r{ScaleKind::linear(), {{0, {0.0}}, {1, {0.0}}, {2, {0.0}}, {3, {0.0}}}};
    CHECK(tokens_per_value(spec_with(r)).value == 4);
}

TEST_CASE("reconstruction rmse") {
    const std::vector<double> floats{0.0, 0.5, 1.25, 1024.0};
    CHECK(reconstruction_rmse(spec_with(ByteParams{}), floats) == 0.0);

    const std::vector<double> ends{0.0, 1.0};
    CHECK(reconstruction_rmse(spec_with(BinSpec{ScaleKind::linear(), 1, 0.0, 1.0}), ends) == 0.5);

    const std::vector<std::size_t> ks{2, 2};
    const std::vector<double> train{0, 1, 10, 11};
    CHECK(reconstruction_rmse(spec_with(rsq_fit(train, ScaleKind::linear(), ks)), train) == 0.0);

    const std::vector<double> round{0.25, 1.5};
    CHECK(reconstruction_rmse(spec_with(NumericParams{2}), round) == 0.0);
    CHECK(reconstruction_rmse(spec_with(NumericParams{0}), std::vector<double>{0.25}) == 0.25);

    // cal_rel works in seconds but reports dataset units: 1 hour + 0.5 s truncates by 0.5 s.
    const std::vector<double> hours{1.0 + 0.5 / 3600};
    CHECK(reconstruction_rmse(spec_with(CalRelParams{{ResolutionKind::second}}), hours) ==
          doctest::Approx(0.5 / 3600));
    // cal_abs takes epoch seconds.
    const std::vector<double> stamps{1642042328.0};
    CHECK(reconstruction_rmse(spec_with(CalAbsParams{{ResolutionKind::second}, 2020, 2024}), stamps) == 0.0);
    CHECK(reconstruction_rmse(spec_with(CalAbsParams{{ResolutionKind::day}, 2020, 2024}), stamps) ==
          doctest::Approx((2 * 3600 + 52 * 60 + 8) / 3600.0));
}

TEST_CASE("synthetic generator") {
    SyntheticConfig cfg;
    cfg.seed = 1;
    CHECK(serialize_dataset(gen_synthetic(cfg)) == serialize_dataset(gen_synthetic(cfg)));
    cfg.seed = 2;
    const auto d = gen_synthetic(cfg);
    CHECK(d.train.size() == 80);
    CHECK(d.val.size() == 10);
    CHECK(d.test.size() == 10);
    for (Split s : {Split::train, Split::val, Split::test})
        for (const auto& q : d.split(s)) {
            q.validate();
            CHECK(validate_consistency(q, cfg.unit, 1.0 / 3600).empty());
        }

    SyntheticConfig ln;
    ln.n_sequences = 100;
    ln.seq_len = 101;
    const auto g = gen_synthetic(ln);
    double sum = 0;
    std::size_t n = 0;
    for (Split s : {Split::train, Split::val, Split::test})
        for (const auto& q : g.split(s))
            for (std::size_t i = 1; i < q.size(); ++i, ++n) sum += std::log(q.events[i].interval_units);
    REQUIRE(n == 10000);
    CHECK(std::abs(sum / n) <= 3.0 / std::sqrt(static_cast<double>(n)));

    SyntheticConfig sp;
    sp.shape = SyntheticShape::spiky;
    sp.atoms = {1, 7};
    sp.atom_weights = {0.5, 0.5};
    sp.jitter = 0;
    for (double v : gen_synthetic(sp).intervals(Split::train)) CHECK((v == 0 || v == 1 || v == 7));

    SyntheticConfig un;
    un.shape = SyntheticShape::uniform;
    const auto u = gen_synthetic(un);
    for (const auto& q : u.train)
        for (std::size_t i = 1; i < q.size(); ++i) CHECK((q.events[i].interval_units >= 1.0 && q.events[i].interval_units <= 2.0));

    SyntheticConfig bad;
    bad.atom_weights = {0.5, 0.2, 0.2};
    CHECK_THROWS_AS(gen_synthetic(bad), Error);
    bad = {};
    bad.n_sequences = 0;
    CHECK_THROWS_AS(gen_synthetic(bad), Error);
    CHECK(parse_synthetic_shape("mixed") == SyntheticShape::mixed);
}

TEST_CASE("compare") {
    SyntheticConfig cfg;
    cfg.unit = kMonth;
    cfg.log_sd = 1.5;
    const auto d = gen_synthetic(cfg);
    std::vector<TokenizerSpec> specs;
    for (auto o : comparison_presets()) specs.push_back(fit_tokenizer(o, d));
    REQUIRE(specs.size() == 12);
    const auto rep = compare(specs, d, 4);
    CHECK(rep.rows.size() == 12);
    CHECK(rep.split == "test");
    CHECK(rep.rows[1].strategy == "byte");
    CHECK(rep.rows[1].reconstruction_rmse < 1e-6);
    for (const auto& r : rep.rows) CHECK(r.reconstruction_rmse >= 0.0);

    // Same rows in any order.
    std::vector<TokenizerSpec> rev(specs.rbegin(), specs.rend());
    const auto back = compare(rev, d, 1);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& a = rep.rows[i];
        const auto& b = back.rows[specs.size() - 1 - i];
        CHECK(a.strategy == b.strategy);
        CHECK(a.levels_or_bins == b.levels_or_bins);
        CHECK(a.reconstruction_rmse == b.reconstruction_rmse);
    }

    const std::string csv = report_csv(rep);
    CHECK(csv.rfind("strategy,scale,levels_or_bins,tokens_per_value,vocab_added,reconstruction_rmse\n", 0) == 0);
    CHECK(csv.find("numeric,-,p6,~4,0,") != std::string::npos);
    CHECK(report_table(rep).find("codec floor") != std::string::npos);

    CHECK(compare(std::span(specs).first(1), d).rows.size() == 1);

    auto hourly = specs[0];
    hourly.unit = kHour;
    try {
        compare(std::span(&hourly, 1), d);
        FAIL("unit mismatch accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::unit_mismatch);
    }
}

TEST_CASE("analyze") {
    SyntheticConfig c;
    c.shape = SyntheticShape::spiky;
    c.atoms = {3.0};
    c.atom_weights = {1.0};
    c.jitter = 0;
    const auto [lin, lg] = analyze(gen_synthetic(c), 20);
    CHECK(std::count_if(lin.counts.begin(), lin.counts.end(), [](auto n) { return n > 0; }) == 1);
    CHECK(std::count_if(lg.counts.begin(), lg.counts.end(), [](auto n) { return n > 0; }) == 1);
    CHECK(lin.total() == 100 * 49);

    SyntheticConfig ln;
    ln.n_sequences = 200;
    const auto [a, b] = analyze(gen_synthetic(ln), 30);
    CHECK(a.total() == 200 * 49);
    CHECK(b.total() == 200 * 49);
    const auto mode = static_cast<std::size_t>(std::max_element(b.counts.begin(), b.counts.end()) - b.counts.begin());
    const double centre = (b.edges[mode] + b.edges[mode + 1]) / 2;
    // Mode of log10 of a lognormal(0, 1) sits at 0; allow a couple of bin widths.
    CHECK(std::abs(centre - 0.0 / std::log(10.0)) <= 2.5 * (b.edges[1] - b.edges[0]));
}

TEST_CASE("log bins beat linear bins on skewed data, not on uniform data") {
    SyntheticConfig skew;
    skew.log_sd = 1.5;
    skew.seed = 7;
    const auto d = gen_synthetic(skew);
    FitOptions o;
    o.strategy = Strategy::scale_bin;
    o.scale = ScaleKind::linear();
    const auto lin = fit_tokenizer(o, d);
    o.scale = ScaleKind::log10();
    const auto lg = fit_tokenizer(o, d);
    const auto test = d.intervals(Split::test);
    CHECK(reconstruction_rmse(lg, test) < reconstruction_rmse(lin, test));

    SyntheticConfig flat;
    flat.shape = SyntheticShape::uniform;
    flat.seed = 7;
    const auto u = gen_synthetic(flat);
    o.scale = ScaleKind::linear();
    const auto ulin = fit_tokenizer(o, u);
    o.scale = ScaleKind::log10();
    const auto ulg = fit_tokenizer(o, u);
    const auto utest = u.intervals(Split::test);
    CHECK(reconstruction_rmse(ulin, utest) <= reconstruction_rmse(ulg, utest));
}
