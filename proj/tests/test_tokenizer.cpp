#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "ttok/bench.hpp"
#include "ttok/codec_simple.hpp"
#include "ttok/error.hpp"
#include "ttok/tokenizer.hpp"

using namespace ttok;
using Tokens = std::vector<std::string>;

namespace {

const TimeUnit kMonth{TimeUnitKind::month};

// The two Stack Overflow events used throughout the worked examples.
EventSequence stack_overflow() {
    EventSequence s;
    const double gap = static_cast<double>(oracle::bits_float(0x3EE00D93u));
    s.events.push_back({"Guru", oracle::timegm(2022, 1, 13, 2, 52, 8), 0.0});
    s.events.push_back({"Good Answer", oracle::timegm(2022, 1, 26, 5, 56, 36), gap});
    return s;
}

TokenizerSpec spec_with(StrategyParams p) {
    TokenizerSpec s;
    s.unit = kMonth;
    s.params = std::move(p);
    return s;
}

Tokens framed(const Tokens& a, const Tokens& b) {
    Tokens out{"<|begin_of_event|>", "<|type_prefix|>", "Guru", "<|time_prefix|>"};
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), {"<|end_of_event|>", "<|begin_of_event|>", "<|type_prefix|>", "Good Answer",
                           "<|time_prefix|>"});
    out.insert(out.end(), b.begin(), b.end());
    out.push_back("<|end_of_event|>");
    return out;
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected ttok::Error");
    return ErrorKind::io;
}

}  // namespace

TEST_CASE("render_event") {
    const Tokens bytes(4, "<|byte_000|>");
    CHECK(render_event("Guru", bytes) == Tokens{"<|begin_of_event|>", "<|type_prefix|>", "Guru", "<|time_prefix|>",
                                                "<|byte_000|>", "<|byte_000|>", "<|byte_000|>", "<|byte_000|>",
                                                "<|end_of_event|>"});
    const Tokens bin{"<|bin_189|>"};
    CHECK(render_event("Good Answer", bin) ==
          Tokens{"<|begin_of_event|>", "<|type_prefix|>", "Good Answer", "<|time_prefix|>", "<|bin_189|>",
                 "<|end_of_event|>"});
    const Tokens zero{"<|bin_000|>"};
    CHECK(render_event("A", zero, TemplateOrder::time_type) ==
          Tokens{"<|begin_of_event|>", "<|time_prefix|>", "<|bin_000|>", "<|type_prefix|>", "A", "<|end_of_event|>"});
    CHECK(parse_template_order("type-time") == TemplateOrder::type_time);
    CHECK(parse_template_order("time_type") == TemplateOrder::time_type);
    CHECK_FALSE(parse_template_order("time"));
}

TEST_CASE("worked example streams") {
    const auto so = stack_overflow();
    CHECK(render_sequence(so, spec_with(NumericParams{6})) == framed({"0.000000"}, {"0.437604"}));
    CHECK(render_sequence(so, spec_with(ByteParams{})) ==
          framed(Tokens(4, "<|byte_000|>"), {"<|byte_147|>", "<|byte_013|>", "<|byte_224|>", "<|byte_062|>"}));
    CHECK(render_sequence(so, spec_with(CalAbsParams{{ResolutionKind::day}, 2020, 2024})) ==
          framed({"<|year_2022|>", "<|month_01|>", "<|day_13|>"}, {"<|year_2022|>", "<|month_01|>", "<|day_26|>"}));
    CHECK(render_sequence(so, spec_with(CalAbsParams{{ResolutionKind::second}, 2020, 2024})) ==
          framed({"<|year_2022|>", "<|month_01|>", "<|day_13|>", "<|hour_02|>", "<|min_52|>", "<|sec_08|>"},
                 {"<|year_2022|>", "<|month_01|>", "<|day_26|>", "<|hour_05|>", "<|min_56|>", "<|sec_36|>"}));
    CHECK(render_sequence(so, spec_with(CalRelParams{{ResolutionKind::day}})) ==
          framed({"<|year_00|>", "<|month_00|>", "<|day_00|>"}, {"<|year_00|>", "<|month_00|>", "<|day_13|>"}));
    CHECK(render_sequence(so, spec_with(CalRelParams{{ResolutionKind::second}})) ==
          framed({"<|year_00|>", "<|month_00|>", "<|day_00|>", "<|hour_00|>", "<|min_00|>", "<|sec_00|>"},
                 {"<|year_00|>", "<|month_00|>", "<|day_13|>", "<|hour_03|>", "<|min_04|>", "<|sec_28|>"}));

    EventSequence one;
    one.events.push_back({"A", 0, 0.0});
    CHECK(render_sequence(one, spec_with(BinSpec{ScaleKind::log10(), 256, -6.0, 1.0})).size() == 6);
}

TEST_CASE("render_sequence annotates codec errors with the event index") {
    auto so = stack_overflow();
    try {
        render_sequence(so, spec_with(CalAbsParams{{ResolutionKind::day}, 2023, 2024}));
        FAIL("year outside the fitted range accepted");
    } catch (const PositionedError& e) {
        CHECK(e.position() == 0);
        CHECK(e.kind() == ErrorKind::range);
    }
    CHECK(kind_of([&] { render_sequence(so, spec_with(BinSpec{})); }) == ErrorKind::unfitted);
}

TEST_CASE("parse_stream") {
    const auto so = stack_overflow();
    const auto spec = spec_with(ByteParams{});
    const auto stream = render_sequence(so, spec);
    const auto events = parse_stream(stream, spec);
    REQUIRE(events.size() == 2);
    CHECK(events[0].type_text == "Guru");
    CHECK(events[1].type_text == "Good Answer");
    CHECK(events[1].time_value == so.events[1].interval_units);
    CHECK(parse_stream(Tokens{}, spec).empty());

    // Host-tokenizer fragments are concatenated back into the type text.
    Tokens frag{"<|begin_of_event|>", "<|type_prefix|>", "G", "uru", "<|time_prefix|>", "<|byte_000|>",
                "<|byte_000|>", "<|byte_000|>", "<|byte_000|>", "<|end_of_event|>"};
    CHECK(parse_stream(frag, spec)[0].type_text == "Guru");

    auto missing_end = stream;
    missing_end.pop_back();
    try {
        parse_stream(missing_end, spec);
        FAIL("truncated stream parsed");
    } catch (const PositionedError& e) {
        CHECK(e.kind() == ErrorKind::grammar);
        CHECK(e.position() == missing_end.size());
    }

    auto short_time = stream;
    short_time.erase(short_time.begin() + 5);
    CHECK(kind_of([&] { parse_stream(short_time, spec); }) == ErrorKind::grammar);

    auto no_prefix = stream;
    no_prefix.erase(no_prefix.begin() + 1);
    try {
        parse_stream(no_prefix, spec);
        FAIL("missing prefix accepted");
    } catch (const PositionedError& e) {
        CHECK(e.position() == 1);
    }

    auto bad_token = stream;
    bad_token[4] = "<|byte_999|>";
    try {
        parse_stream(bad_token, spec);
        FAIL("bad byte accepted");
    } catch (const PositionedError& e) {
        CHECK(e.position() == 4);
        CHECK(e.kind() == ErrorKind::malformed_token);
    }

    // The wrong order is a grammar error.
    CHECK(kind_of([&] { parse_stream(stream, spec, TemplateOrder::time_type); }) == ErrorKind::grammar);
    const auto tt = render_sequence(so, spec, TemplateOrder::time_type);
    CHECK(parse_stream(tt, spec, TemplateOrder::time_type).size() == 2);
}

TEST_CASE("manifest") {
    const auto byte = build_manifest(spec_with(ByteParams{}));
    CHECK(byte.tokens.size() == 260);
    CHECK(byte.tokens[0] == "<|begin_of_event|>");
    CHECK(byte.tokens[1] == "<|end_of_event|>");
    CHECK(byte.counts[0] == std::pair<std::string, std::size_t>{"structural", 4});
    CHECK(byte.counts[1].second == 256);

    CHECK(build_manifest(spec_with(NumericParams{6})).tokens.size() == 4);

    std::mt19937_64 rng(4);
    std::lognormal_distribution<double> ln(0.0, 1.0);
    std::vector<double> xs(3000);
    for (auto& x : xs) x = ln(rng);
    const std::vector<std::size_t> ks{64, 64, 64, 64};
    const auto rsq = spec_with(rsq_fit(xs, ScaleKind::log10(), ks));
    const auto m = build_manifest(rsq);
    CHECK(m.counts[1].second == 256);
    CHECK(std::set<std::string>(m.tokens.begin(), m.tokens.end()).size() == m.tokens.size());
    CHECK(manifest_to_json(m) == manifest_to_json(build_manifest(rsq)));

    const auto cal = build_manifest(spec_with(CalAbsParams{{ResolutionKind::second}, 2020, 2024}));
    CHECK(cal.counts[1].second == 5 + 12 + 31 + 24 + 60 + 60);
    CHECK(kind_of([] { build_manifest(spec_with(RsqSpec{})); }) == ErrorKind::unfitted);
}

TEST_CASE("fit") {
    const auto so = stack_overflow();
    const std::vector<double> gaps{0.0, so.events[1].interval_units};
    const std::vector<std::int64_t> stamps{so.events[0].timestamp_s, so.events[1].timestamp_s};
    FitOptions o;
    o.strategy = Strategy::cal_abs;
    const auto cal = fit_tokenizer(o, kMonth, gaps, stamps);
    CHECK(std::get<CalAbsParams>(cal.params).year_lo == 2020);
    CHECK(std::get<CalAbsParams>(cal.params).year_hi == 2024);
    o.strategy = Strategy::scale_bin;
    o.scale = ScaleKind::log10();
    o.bins = 256;
    const auto bin = std::get<BinSpec>(fit_tokenizer(o, kMonth, gaps, stamps).params);
    CHECK(bin.lo == doctest::Approx(-6.0));
    CHECK(bin_encode(0.0, bin) == 0);
    CHECK(bin_encode(so.events[1].interval_units, bin) == 255);
    o.strategy = Strategy::numeric;
    o.precision = 20;
    CHECK(kind_of([&] { fit_tokenizer(o, kMonth, gaps, stamps); }) == ErrorKind::invalid_parameter);
    CHECK(parse_strategy("cal-rel") == Strategy::cal_rel);
    CHECK(parse_strategy("bin") == Strategy::scale_bin);
    CHECK(to_string(Strategy::scale_bin) == "scale_bin");
}

TEST_CASE("spec files") {
    std::mt19937_64 rng(5);
    std::lognormal_distribution<double> ln(0.0, 1.5);
    std::vector<double> xs(2000);
    for (auto& x : xs) x = ln(rng);
    const std::vector<std::size_t> ks{64, 64, 64, 64};
    const auto rsq = spec_with(rsq_fit(xs, ScaleKind::log10(), ks));
    const std::string text = spec_to_json(rsq);
    const auto back = spec_from_json(text);
    CHECK(spec_to_json(back) == text);
    const auto& a = std::get<RsqSpec>(rsq.params);
    const auto& b = std::get<RsqSpec>(back.params);
    for (std::size_t l = 0; l < a.levels.size(); ++l) CHECK(a.levels[l].centroids == b.levels[l].centroids);
    for (double x : xs) CHECK(encode_time(rsq, x) == encode_time(back, x));

    CHECK(kind_of([&] { spec_from_json(text.substr(0, text.size() / 2)); }) == ErrorKind::schema);
    CHECK(kind_of([] { spec_from_json("[]"); }) == ErrorKind::schema);

    std::string future = text;
    future.replace(future.find("\"version\": \"1\""), 14, "\"version\": \"2\"");
    try {
        spec_from_json(future);
        FAIL("future version accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::version_mismatch);
        const std::string msg = e.what();
        CHECK(msg.find("version 2") != std::string::npos);
        CHECK(msg.find("version 1") != std::string::npos);
    }

    std::string tampered = text;
    tampered.replace(tampered.find("\"unit\": \"month\""), 15, "\"unit\": \"hour\"");
    CHECK(kind_of([&] { spec_from_json(tampered); }) == ErrorKind::checksum_mismatch);

    const auto dir = std::filesystem::temp_directory_path() / "ttok_spec_test";
    std::filesystem::create_directories(dir);
    save_spec(rsq, dir / "s.json");
    CHECK(spec_to_json(load_spec(dir / "s.json")) == text);
    const auto tok = Tokenizer::load(dir / "s.json");
    CHECK(tok.strategy() == Strategy::rsq);
    CHECK(tok.encode_value(1.0) == encode_time(rsq, 1.0));
    CHECK(tok.vocab().size() == 260);
    std::filesystem::remove_all(dir);
    CHECK(kind_of([&] { load_spec(dir / "missing.json"); }) == ErrorKind::io);
}

TEST_CASE("bindings facade") {
    const Tokenizer t(spec_with(ByteParams{}));
    CHECK(t.encode_value(0.0) == Tokens(4, "<|byte_000|>"));
    const auto s = t.render_sequence(R"({"type_text":["Guru"],"timestamp":[1642042328],"interval":[0.0]})");
    CHECK(s.size() == 9);
    CHECK(t.decode_value(Tokens{"<|byte_147|>", "<|byte_013|>", "<|byte_224|>", "<|byte_062|>"}) ==
          static_cast<double>(oracle::bits_float(0x3EE00D93u)));
}

TEST_CASE("token streams jsonl") {
    const std::vector<TokenStream> streams{{"<|begin_of_event|>", "a \"quoted\" type"}, {}};
    const std::string text = streams_to_jsonl(streams);
    CHECK(text.rfind("{\"tokens\":", 0) == 0);
    CHECK(streams_from_jsonl(text) == streams);
    CHECK_THROWS_AS(streams_from_jsonl("{\"toks\":[]}\n"), Error);
}

TEST_CASE("render_sequences is thread-count independent") {
    SyntheticConfig cfg;
    cfg.n_sequences = 200;
    cfg.unit = kMonth;
    const auto d = gen_synthetic(cfg);
    FitOptions o;
    o.strategy = Strategy::rsq;
    o.scale = ScaleKind::log10();
    const auto spec = fit_tokenizer(o, d);
    const auto a = render_sequences(d.train, spec, TemplateOrder::type_time, 1);
    const auto b = render_sequences(d.train, spec, TemplateOrder::type_time, 4);
    CHECK(a == b);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == render_sequence(d.train[i], spec));
}
