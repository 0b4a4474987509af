#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "rismod/csv.hpp"
#include "rismod/errors.hpp"
#include "rismod/job_config.hpp"

using namespace rismod;

namespace {

ConstellationSet sample_set(SchemeKind kind, int M, int V) {
    SchemeConfig s;
    s.kind = kind;
    s.M = M;
    s.V = V;
    LinkConfig l;
    l.N = 64;
    const auto g = draw_equivalent_gains(l, 3, 0);
    return received_signal_set(g, s, partition_blocks(64, s), 3);
}

std::string error_of(const std::string& text) {
    try {
        parse_job_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kMinimal = R"({"job":"sep","link":{"N":64},"scheme":{"kind":"QAPSK","M":16,"V":4},"snr_db":[-20,-10]})";

} // namespace

TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 55.27, 0.0}) {
        const auto s = format_double(x);
        CHECK(std::stod(s) == x);
    }
    CHECK(format_double(-25.0) == "-25");
}

TEST_CASE("constellation CSV round-trip") {
    for (auto [kind, M, V] : {std::tuple{SchemeKind::psk, 8, 1}, std::tuple{SchemeKind::apsk, 32, 8},
                              std::tuple{SchemeKind::qapsk, 16, 4}}) {
        const auto cs = sample_set(kind, M, V);
        std::stringstream ss;
        write_constellation_csv(ss, cs, {"hello", "seed 3"});
        const auto f = read_constellation_csv(ss);
        CHECK(f.header == std::vector<std::string>{"hello", "seed 3"});
        REQUIRE(f.rows.size() == cs.size());
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const auto& r = f.rows[i];
            CHECK(r.re == cs.points[i].real());
            CHECK(r.im == cs.points[i].imag());
            CHECK(r.l.has_value() == (kind == SchemeKind::apsk));
            CHECK(r.l1.has_value() == (kind == SchemeKind::qapsk));
            CHECK(r.v.has_value() == (kind != SchemeKind::psk));
            if (r.l) CHECK(*r.l == cs.labels[i].l);
            if (r.l1) CHECK(*r.l1 == cs.labels[i].l1);
            if (r.l2) CHECK(*r.l2 == cs.labels[i].l2);
            if (r.v) CHECK(*r.v == cs.labels[i].v);
        }
    }
}

TEST_CASE("sweep CSV round-trip") {
    SweepResult r;
    for (int i = 0; i < 3; ++i) {
        SweepPoint p;
        p.snr_db = -20.5 + i;
        p.sep_sim = 0.1 / (i + 1);
        p.sep_stderr = 1e-3 / 3.0;
        p.trials = 12345;
        p.channels = 7;
        p.sep_theory = 0.3 / (i + 3);
        r.points.push_back(p);
    }
    std::stringstream ss;
    write_sweep_csv(ss, r, {Metric::sep_sim, Metric::sep_theory, Metric::capacity_gh});
    const auto text = ss.str();
    CHECK(text.find('\r') == std::string::npos);
    const auto f = read_sweep_csv(ss);
    REQUIRE(f.rows.size() == 6);
    for (int i = 0; i < 3; ++i) {
        CHECK(f.rows[i].metric == "sep_sim");
        CHECK(f.rows[i].snr_db == r.points[i].snr_db);
        CHECK(f.rows[i].value == *r.points[i].sep_sim);
        CHECK(f.rows[i].stderr_ == r.points[i].sep_stderr);
        CHECK(f.rows[i].trials == 12345);
        CHECK(f.rows[3 + i].metric == "sep_theory");
        CHECK_FALSE(f.rows[3 + i].stderr_.has_value());
        CHECK(f.rows[3 + i].value == *r.points[i].sep_theory);
    }
}

TEST_CASE("CSV readers reject malformed input and name the column") {
    std::stringstream empty("# x\nsnr_db,metric,value,stderr,trials,channels\n");
    CHECK_THROWS_AS(read_sweep_csv(empty), ConfigError);

    std::stringstream wrong("snr_db,metric,val,stderr,trials,channels\n1,a,2,,3,4\n");
    try {
        read_sweep_csv(wrong);
        FAIL("expected error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("'value'") != std::string::npos);
    }

    std::stringstream bad("snr_db,metric,value,stderr,trials,channels\n1,a,x,,3,4\n");
    try {
        read_sweep_csv(bad);
        FAIL("expected error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("'value'") != std::string::npos);
    }

    std::stringstream labels("label,l,l1,l2,v,re,im\n1,,,,,0,0\n");
    CHECK_THROWS_AS(read_constellation_csv(labels), ConfigError);
}

TEST_CASE("job config defaults and resolution") {
    const auto c = parse_job_config(kMinimal);
    CHECK(c.job == JobKind::sep);
    CHECK(c.sweep.link.N == 64);
    CHECK(c.sweep.link.K == 1);
    CHECK(c.sweep.link.B == 3);
    CHECK(c.sweep.link.kappa == 1.0);
    CHECK(c.sweep.trials_per_point == 10000);
    CHECK(c.sweep.channels_per_point == 100);
    CHECK(c.sweep.master_seed == 1);
    CHECK(c.sweep.snr_grid_db == std::vector<double>{-20, -10});
    CHECK(c.theory.mode == TheoryMode::channel_average);
    CHECK(c.theory.realizations == 100);

    // Resolved text is canonical: re-parsing it reproduces it.
    CHECK(parse_job_config(c.resolved).resolved == c.resolved);
    const auto j = nlohmann::json::parse(c.resolved);
    CHECK(j["link"]["ra_spacing_over_lambda"] == 0.5);
    CHECK(j["theory"]["mode"] == "channel_average");
    // Keys are sorted.
    std::string prev;
    for (const auto& [k, v] : j.items()) {
        CHECK(prev < k);
        prev = k;
    }
}

TEST_CASE("job config overrides") {
    const auto c = parse_job_config(kMinimal, 99);
    CHECK(c.sweep.master_seed == 99);
    CHECK(nlohmann::json::parse(c.resolved)["seed"] == 99);

    const auto d = parse_job_config(
        R"({"job":"sep","link":{"N":64,"kappa_db":10},"scheme":{"kind":"psk","M":8},"snr_db":[0]})");
    CHECK(d.sweep.link.kappa == doctest::Approx(10.0));

    CHECK_THROWS_AS(parse_job_config(kMinimal, std::nullopt, JobKind::capacity), ConfigError);
    const auto e = parse_job_config(R"({"link":{"N":64},"scheme":{"kind":"APSK","M":16,"V":4},"snr_db":[0]})",
                                    std::nullopt, JobKind::theory);
    CHECK(e.job == JobKind::theory);
}

TEST_CASE("job config rejects bad input") {
    CHECK(error_of(R"({"job":"sep","link":{"N":64,"colour":1},"scheme":{"kind":"PSK","M":8},"snr_db":[0]})")
              .find("link.colour") != std::string::npos);
    CHECK(error_of(R"({"job":"sep","extra":1,"link":{"N":64},"scheme":{"kind":"PSK","M":8},"snr_db":[0]})")
              .find("extra") != std::string::npos);
    CHECK(error_of(R"({"job":"sep","link":{"N":64,"B":2},"scheme":{"kind":"APSK","M":16,"V":8},"snr_db":[0]})") ==
          "V must divide 2^B: V=8, B=2");
    CHECK(error_of(R"({"job":"sep","link":{"N":64},"scheme":{"kind":"PSK","M":8},"snr_db":[]})") ==
          "SNR grid must not be empty");
    CHECK_FALSE(error_of(R"({"job":"sep","link":{"N":"64"},"scheme":{"kind":"PSK","M":8},"snr_db":[0]})").empty());
    CHECK_FALSE(error_of("{not json").empty());
    CHECK_FALSE(error_of(R"({"job":"dance","link":{"N":64},"scheme":{"kind":"PSK","M":8},"snr_db":[0]})").empty());
    CHECK_FALSE(
        error_of(R"({"job":"theory","link":{"N":64},"scheme":{"kind":"PSK","M":8},"snr_db":[0]})").empty());
    CHECK_FALSE(error_of(R"({"job":"sep","link":{"N":64,"kappa":1,"kappa_db":0},"scheme":{"kind":"PSK","M":8},)"
                         R"("snr_db":[0]})")
                    .empty());
    // Constellation jobs need no grid.
    CHECK(error_of(R"({"job":"constellation","link":{"N":64},"scheme":{"kind":"PSK","M":8}})").empty());
}
