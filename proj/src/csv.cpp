#include "rismod/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "rismod/errors.hpp"

namespace rismod {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

[[noreturn]] void bad(std::size_t line, std::string_view column, std::string_view what) {
    throw ConfigError("line " + std::to_string(line) + ", column '" + std::string(column) + "': " +
                      std::string(what));
}

template <class T>
T parse_number(const std::string& s, std::size_t line, std::string_view column) {
    T v{};
    const auto* end = s.data() + s.size();
    const auto [p, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc{} || p != end) bad(line, column, "not a number: '" + s + "'");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) bad(line, column, "not finite");
    }
    return v;
}

template <class T>
std::optional<T> parse_optional(const std::string& s, std::size_t line, std::string_view column) {
    if (s.empty()) return std::nullopt;
    return parse_number<T>(s, line, column);
}

// Reads comment lines and the column row; returns data lines with their
// 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_body(std::istream& is, std::string_view columns,
                                                           std::vector<std::string>& header) {
    std::string line;
    std::size_t n = 0;
    bool have_columns = false;
    std::vector<std::pair<std::size_t, std::string>> body;
    while (std::getline(is, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') bad(n, "", "CR line ending");
        if (!have_columns) {
            if (!line.empty() && line[0] == '#') {
                header.push_back(line.size() >= 2 && line[1] == ' ' ? line.substr(2) : line.substr(1));
                continue;
            }
            if (line != columns) {
                const auto want = split(std::string(columns));
                const auto got = split(line);
                for (std::size_t i = 0; i < want.size(); ++i) {
                    if (i >= got.size() || got[i] != want[i]) bad(n, want[i], "missing or misplaced column");
                }
                bad(n, got[want.size()], "unexpected column");
            }
            have_columns = true;
            continue;
        }
        if (line.empty()) continue;
        body.emplace_back(n, line);
    }
    if (!have_columns) bad(n, "", "no column row");
    if (body.empty()) bad(n, "", "no data rows");
    return body;
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, p);
}

void write_header(std::ostream& os, const std::vector<std::string>& lines) {
    for (const auto& l : lines) os << "# " << l << '\n';
}

void write_constellation_csv(std::ostream& os, const ConstellationSet& cs, const std::vector<std::string>& header) {
    write_header(os, header);
    os << kConstellationColumns << '\n';
    const auto kind = cs.scheme.kind;
    for (std::size_t i = 0; i < cs.points.size(); ++i) {
        const auto& lab = cs.labels[i];
        os << i << ',';
        os << (kind == SchemeKind::apsk ? std::to_string(lab.l) : "") << ',';
        os << (kind == SchemeKind::qapsk ? std::to_string(lab.l1) : "") << ',';
        os << (kind == SchemeKind::qapsk ? std::to_string(lab.l2) : "") << ',';
        os << (kind != SchemeKind::psk ? std::to_string(lab.v) : "") << ',';
        os << format_double(cs.points[i].real()) << ',' << format_double(cs.points[i].imag()) << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const SweepResult& r, const std::vector<Metric>& metrics,
                     const std::vector<std::string>& header) {
    write_header(os, header);
    os << kSweepColumns << '\n';
    for (const auto m : metrics) {
        for (const auto& p : r.points) {
            const auto v = metric_value(p, m);
            if (!v) continue;
            const auto se = metric_stderr(p, m);
            std::uint64_t trials = 0;
            if (m == Metric::sep_sim) trials = p.trials;
            if (m == Metric::capacity_sim) trials = p.noise_samples;
            os << format_double(p.snr_db) << ',' << to_string(m) << ',' << format_double(*v) << ','
               << (se ? format_double(*se) : "") << ',' << trials << ',' << p.channels << '\n';
        }
    }
}

CsvFile<ConstellationRow> read_constellation_csv(std::istream& is) {
    CsvFile<ConstellationRow> out;
    for (const auto& [n, line] : read_body(is, kConstellationColumns, out.header)) {
        const auto f = split(line);
        if (f.size() != 7) bad(n, "", "expected 7 fields, got " + std::to_string(f.size()));
        ConstellationRow r;
        r.label = parse_number<int>(f[0], n, "label");
        r.l = parse_optional<int>(f[1], n, "l");
        r.l1 = parse_optional<int>(f[2], n, "l1");
        r.l2 = parse_optional<int>(f[3], n, "l2");
        r.v = parse_optional<int>(f[4], n, "v");
        r.re = parse_number<double>(f[5], n, "re");
        r.im = parse_number<double>(f[6], n, "im");
        if (r.label != static_cast<int>(out.rows.size())) bad(n, "label", "labels must run 0, 1, 2, ...");
        if (r.l1.has_value() != r.l2.has_value()) bad(n, "l2", "l1 and l2 must be set together");
        if (r.l && r.l1) bad(n, "l", "l and l1/l2 are exclusive");
        out.rows.push_back(r);
    }
    return out;
}

CsvFile<SweepRow> read_sweep_csv(std::istream& is) {
    CsvFile<SweepRow> out;
    for (const auto& [n, line] : read_body(is, kSweepColumns, out.header)) {
        const auto f = split(line);
        if (f.size() != 6) bad(n, "", "expected 6 fields, got " + std::to_string(f.size()));
        SweepRow r;
        r.snr_db = parse_number<double>(f[0], n, "snr_db");
        if (f[1].empty()) bad(n, "metric", "empty");
        r.metric = f[1];
        r.value = parse_number<double>(f[2], n, "value");
        r.stderr_ = parse_optional<double>(f[3], n, "stderr");
        r.trials = parse_number<std::uint64_t>(f[4], n, "trials");
        r.channels = parse_number<std::uint32_t>(f[5], n, "channels");
        out.rows.push_back(r);
    }
    return out;
}

} // namespace rismod
