#include "rismod/modulation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "rismod/errors.hpp"

namespace rismod {

using std::numbers::pi;

namespace {

bool is_pow2(long long x) noexcept { return x > 0 && (x & (x - 1)) == 0; }

int isqrt_exact(int x) noexcept {
    const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(x))));
    return r * r == x ? r : -1;
}

std::string kv(const char* name, long long value) { return std::string(name) + "=" + std::to_string(value); }

void check_label_range(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("symbol label out of range: " + what);
}

// Steps of the 2^B grid covered by a rotation of 2pi/V. Requires V | 2^B.
std::int64_t grid_steps_per_phase(int V, int B) noexcept { return (std::int64_t{1} << B) / V; }

// Quantized phase of e^{j 2pi v/V} conj(g_n), written into `pattern` for
// every element of `blk` and switched ON. `extra_steps` adds a grid rotation
// after quantization (the Q-branch e^{j2pi/V}).
void fill_block(std::span<const cdouble> g, const Block& blk, cdouble rotation, int B, std::int64_t extra_steps,
                RisPattern& pattern) {
    for (std::size_t n = blk.begin; n < blk.end; ++n) {
        pattern.amplitude[n] = 1;
        pattern.phase[n] = quantize_phase(rotation * std::conj(g[n]), B).rotated(extra_steps);
    }
}

RisPattern empty_pattern(std::size_t n, int B) {
    return {std::vector<std::uint8_t>(n, 0), std::vector<QuantizedPhase>(n, QuantizedPhase(0, B))};
}

} // namespace

std::string_view to_string(SchemeKind kind) noexcept {
    switch (kind) {
    case SchemeKind::psk: return "PSK";
    case SchemeKind::apsk: return "APSK";
    case SchemeKind::qapsk: return "QAPSK";
    }
    return "?";
}

SchemeKind scheme_kind_from_string(std::string_view name) {
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    if (up == "PSK") return SchemeKind::psk;
    if (up == "APSK" || up == "A-PSK") return SchemeKind::apsk;
    if (up == "QAPSK" || up == "QA-PSK") return SchemeKind::qapsk;
    throw ConfigError("unknown scheme kind: " + std::string(name));
}

int SchemeConfig::layers() const noexcept {
    switch (kind) {
    case SchemeKind::psk: return 1;
    case SchemeKind::apsk: return V > 0 ? M / V : 0;
    case SchemeKind::qapsk: return V > 0 ? std::max(isqrt_exact(M / V), 0) : 0;
    }
    return 0;
}

void SchemeConfig::validate(int N, int B) const {
    if (N < 1) throw ConfigError("N must be positive: " + kv("N", N));
    if (B < 1 || B > 24) throw ConfigError("B must be in [1, 24]: " + kv("B", B));
    if (M < 2) throw ConfigError("M must be at least 2: " + kv("M", M));
    if (kind == SchemeKind::psk) return;

    if (!is_pow2(M)) throw ConfigError("M must be a power of 2: " + kv("M", M));
    if (!is_pow2(V)) throw ConfigError("V must be a power of 2: " + kv("V", V));
    if (V > (1 << B) || ((1 << B) % V) != 0)
        throw ConfigError("V must divide 2^B: " + kv("V", V) + ", " + kv("B", B));
    if (M % V != 0) throw ConfigError("V must divide M: " + kv("V", V) + ", " + kv("M", M));
    if (kind == SchemeKind::qapsk && B < 2) throw ConfigError("QAPSK requires B >= 2: " + kv("B", B));
    partition_blocks(N, *this);
}

std::vector<Block> BlockPartition::branch(Branch b) const {
    std::vector<Block> out;
    for (const auto& blk : blocks)
        if (blk.branch == b) out.push_back(blk);
    return out;
}

BlockPartition partition_blocks(int N, const SchemeConfig& scheme) {
    if (N < 1) throw ConfigError("N must be positive: " + kv("N", N));
    BlockPartition part;
    const auto n = static_cast<std::size_t>(N);
    switch (scheme.kind) {
    case SchemeKind::psk:
        part.blocks.push_back({0, n, Branch::none});
        break;
    case SchemeKind::apsk: {
        if (scheme.V < 1 || scheme.M % scheme.V != 0)
            throw ConfigError("V must divide M: " + kv("V", scheme.V) + ", " + kv("M", scheme.M));
        const int L = scheme.M / scheme.V;
        if (N % L != 0)
            throw ConfigError("M/V must divide N (block size NV/M must be an integer): " + kv("M/V", L) + ", " +
                              kv("N", N));
        const std::size_t size = n / static_cast<std::size_t>(L);
        for (int l = 0; l < L; ++l) part.blocks.push_back({l * size, (l + 1) * size, Branch::none});
        break;
    }
    case SchemeKind::qapsk: {
        if (scheme.V < 1 || scheme.M % scheme.V != 0)
            throw ConfigError("V must divide M: " + kv("V", scheme.V) + ", " + kv("M", scheme.M));
        const int s = isqrt_exact(scheme.M / scheme.V);
        if (s < 1) throw ConfigError("M/V must be a perfect square: " + kv("M/V", scheme.M / scheme.V));
        if (N % (2 * s) != 0)
            throw ConfigError("(N/2)*sqrt(V/M) must be a positive integer: " + kv("N", N) + ", " +
                              kv("sqrt(M/V)", s));
        const std::size_t size = n / static_cast<std::size_t>(2 * s);
        for (int l = 0; l < s; ++l) part.blocks.push_back({l * size, (l + 1) * size, Branch::in_phase});
        const std::size_t half = n / 2;
        for (int l = 0; l < s; ++l)
            part.blocks.push_back({half + l * size, half + (l + 1) * size, Branch::quadrature});
        break;
    }
    }
    return part;
}

SymbolLabel decode_label(const SchemeConfig& scheme, int index) {
    check_label_range(index >= 0 && index < scheme.M, kv("index", index));
    SymbolLabel lab;
    lab.m = index;
    switch (scheme.kind) {
    case SchemeKind::psk:
        break;
    case SchemeKind::apsk: {
        const int L = scheme.layers();
        lab.v = index / L;
        lab.l = index % L + 1;
        break;
    }
    case SchemeKind::qapsk: {
        const int s = scheme.layers();
        const int per_phase = s * s;
        lab.v = index / per_phase;
        const int r = index % per_phase;
        lab.l1 = r / s + 1;
        lab.l2 = r % s + 1;
        break;
    }
    }
    return lab;
}

int encode_label(const SchemeConfig& scheme, const SymbolLabel& label) {
    switch (scheme.kind) {
    case SchemeKind::psk:
        check_label_range(label.m >= 0 && label.m < scheme.M, kv("m", label.m));
        return label.m;
    case SchemeKind::apsk: {
        const int L = scheme.layers();
        check_label_range(label.l >= 1 && label.l <= L, kv("l", label.l));
        check_label_range(label.v >= 0 && label.v < scheme.V, kv("v", label.v));
        return label.v * L + (label.l - 1);
    }
    case SchemeKind::qapsk: {
        const int s = scheme.layers();
        check_label_range(label.l1 >= 1 && label.l1 <= s, kv("l1", label.l1));
        check_label_range(label.l2 >= 1 && label.l2 <= s, kv("l2", label.l2));
        check_label_range(label.v >= 0 && label.v < scheme.V, kv("v", label.v));
        return label.v * s * s + (label.l1 - 1) * s + (label.l2 - 1);
    }
    }
    return -1;
}

RisPattern psk_pattern(std::span<const cdouble> g, int m, int M, int B) {
    check_label_range(m >= 0 && m < M, kv("m", m));
    auto pattern = empty_pattern(g.size(), B);
    const auto rot = std::polar(1.0, 2.0 * pi * m / M);
    fill_block(g, Block{0, g.size(), Branch::none}, rot, B, 0, pattern);
    return pattern;
}

RisPattern apsk_pattern(std::span<const cdouble> g, const BlockPartition& part, int l, int v,
                        const SchemeConfig& scheme, int B) {
    check_label_range(l >= 1 && l <= static_cast<int>(part.blocks.size()), kv("l", l));
    check_label_range(v >= 0 && v < scheme.V, kv("v", v));
    auto pattern = empty_pattern(g.size(), B);
    const auto rot = std::polar(1.0, 2.0 * pi * v / scheme.V);
    for (int b = 0; b < l; ++b) fill_block(g, part.blocks[b], rot, B, 0, pattern);
    return pattern;
}

RisPattern qapsk_pattern(std::span<const cdouble> g, const BlockPartition& part, int l1, int l2, int v,
                         const SchemeConfig& scheme, int B) {
    const auto iblocks = part.branch(Branch::in_phase);
    const auto qblocks = part.branch(Branch::quadrature);
    check_label_range(l1 >= 1 && l1 <= static_cast<int>(iblocks.size()), kv("l1", l1));
    check_label_range(l2 >= 1 && l2 <= static_cast<int>(qblocks.size()), kv("l2", l2));
    check_label_range(v >= 0 && v < scheme.V, kv("v", v));
    auto pattern = empty_pattern(g.size(), B);
    const auto rot = std::polar(1.0, 2.0 * pi * v / scheme.V);
    const auto q_shift = grid_steps_per_phase(scheme.V, B);
    for (int b = 0; b < l1; ++b) fill_block(g, iblocks[b], rot, B, 0, pattern);
    for (int b = 0; b < l2; ++b) fill_block(g, qblocks[b], rot, B, q_shift, pattern);
    return pattern;
}

RisPattern pattern_for(std::span<const cdouble> g, const BlockPartition& part, const SchemeConfig& scheme,
                       int B, int index) {
    const auto lab = decode_label(scheme, index);
    switch (scheme.kind) {
    case SchemeKind::psk: return psk_pattern(g, lab.m, scheme.M, B);
    case SchemeKind::apsk: return apsk_pattern(g, part, lab.l, lab.v, scheme, B);
    case SchemeKind::qapsk: return qapsk_pattern(g, part, lab.l1, lab.l2, lab.v, scheme, B);
    }
    return {};
}

cdouble received_point(std::span<const cdouble> g, const RisPattern& pattern) {
    cdouble acc{0.0, 0.0};
    for (std::size_t n = 0; n < g.size(); ++n)
        if (pattern.amplitude[n]) acc += g[n] * std::polar(1.0, pattern.phase[n].value());
    return acc;
}

namespace {

cdouble block_sum(std::span<const cdouble> g, const Block& blk, const RisPattern& pattern) {
    cdouble acc{0.0, 0.0};
    for (std::size_t n = blk.begin; n < blk.end; ++n)
        if (pattern.amplitude[n]) acc += g[n] * std::polar(1.0, pattern.phase[n].value());
    return acc;
}

} // namespace

ConstellationSet received_signal_set(std::span<const cdouble> g, const SchemeConfig& scheme,
                                     const BlockPartition& part, int B) {
    scheme.validate(static_cast<int>(g.size()), B);
    ConstellationSet cs;
    cs.scheme = scheme;
    cs.points.reserve(scheme.M);
    cs.labels.reserve(scheme.M);
    for (int i = 0; i < scheme.M; ++i) {
        cs.labels.push_back(decode_label(scheme, i));
        cs.points.push_back(received_point(g, pattern_for(g, part, scheme, B, i)));
    }

    switch (scheme.kind) {
    case SchemeKind::psk: {
        const auto p0 = psk_pattern(g, 0, scheme.M, B);
        cs.block_gains.push_back(block_sum(g, part.blocks.front(), p0));
        break;
    }
    case SchemeKind::apsk: {
        const auto full = apsk_pattern(g, part, scheme.layers(), 0, scheme, B);
        for (const auto& blk : part.blocks) cs.block_gains.push_back(block_sum(g, blk, full));
        break;
    }
    case SchemeKind::qapsk: {
        const int s = scheme.layers();
        const auto full = qapsk_pattern(g, part, s, s, 0, scheme, B);
        const auto derotate = std::polar(1.0, -2.0 * pi / scheme.V);
        for (const auto& blk : part.branch(Branch::in_phase)) cs.block_gains_i.push_back(block_sum(g, blk, full));
        for (const auto& blk : part.branch(Branch::quadrature))
            cs.block_gains_q.push_back(derotate * block_sum(g, blk, full));
        break;
    }
    }
    return cs;
}

ConstellationSet assemble_constellation(const SchemeConfig& scheme, std::span<const cdouble> gains,
                                        std::span<const cdouble> gains_q) {
    ConstellationSet cs;
    cs.scheme = scheme;
    cs.points.resize(scheme.M);
    cs.labels.resize(scheme.M);
    switch (scheme.kind) {
    case SchemeKind::psk:
        if (gains.size() != 1) throw ConfigError("PSK constellation takes exactly one gain");
        cs.block_gains.assign(gains.begin(), gains.end());
        for (int m = 0; m < scheme.M; ++m) {
            cs.labels[m] = decode_label(scheme, m);
            cs.points[m] = std::polar(1.0, 2.0 * pi * m / scheme.M) * gains[0];
        }
        break;
    case SchemeKind::apsk: {
        const int L = scheme.layers();
        if (static_cast<int>(gains.size()) != L) throw ConfigError("APSK constellation needs M/V block gains");
        cs.block_gains.assign(gains.begin(), gains.end());
        for (int i = 0; i < scheme.M; ++i) {
            const auto lab = decode_label(scheme, i);
            cdouble acc{0.0, 0.0};
            for (int l = 0; l < lab.l; ++l) acc += gains[l];
            cs.labels[i] = lab;
            cs.points[i] = std::polar(1.0, 2.0 * pi * lab.v / scheme.V) * acc;
        }
        break;
    }
    case SchemeKind::qapsk: {
        const int s = scheme.layers();
        if (static_cast<int>(gains.size()) != s || static_cast<int>(gains_q.size()) != s)
            throw ConfigError("QAPSK constellation needs sqrt(M/V) gains per branch");
        cs.block_gains_i.assign(gains.begin(), gains.end());
        cs.block_gains_q.assign(gains_q.begin(), gains_q.end());
        const auto q_rot = std::polar(1.0, 2.0 * pi / scheme.V);
        for (int i = 0; i < scheme.M; ++i) {
            const auto lab = decode_label(scheme, i);
            cdouble si{0.0, 0.0}, sq{0.0, 0.0};
            for (int l = 0; l < lab.l1; ++l) si += gains[l];
            for (int l = 0; l < lab.l2; ++l) sq += gains_q[l];
            cs.labels[i] = lab;
            cs.points[i] = std::polar(1.0, 2.0 * pi * lab.v / scheme.V) * (si + q_rot * sq);
        }
        break;
    }
    }
    return cs;
}

} // namespace rismod
