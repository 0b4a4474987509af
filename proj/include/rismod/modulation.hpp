#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rismod/channel.hpp"

namespace rismod {

enum class SchemeKind { psk, apsk, qapsk };

std::string_view to_string(SchemeKind kind) noexcept;
/// Accepts "PSK", "APSK", "QAPSK" (case-insensitive). Throws ConfigError.
SchemeKind scheme_kind_from_string(std::string_view name);

struct SchemeConfig {
    SchemeKind kind = SchemeKind::psk;
    int M = 2;
    int V = 1;  // phase levels; unused by PSK

    /// Amplitude levels: 1 for PSK, M/V for APSK, sqrt(M/V) per branch for QAPSK.
    int layers() const noexcept;

    /// Checks every scheme constraint against an N-element, B-bit RIS.
    /// Throws ConfigError naming the violated constraint.
    void validate(int N, int B) const;
};

enum class Branch { none, in_phase, quadrature };

struct Block {
    std::size_t begin = 0;
    std::size_t end = 0;  // one past the last element
    Branch branch = Branch::none;

    std::size_t size() const noexcept { return end - begin; }
};

/// Contiguous, disjoint blocks covering [0, N). QAPSK lists its I-branch
/// blocks first (elements [0, N/2)), then the Q-branch blocks.
struct BlockPartition {
    std::vector<Block> blocks;

    std::size_t block_size() const noexcept { return blocks.empty() ? 0 : blocks.front().size(); }
    std::vector<Block> branch(Branch b) const;
};

/// Canonical partition. Throws ConfigError on a divisibility violation.
BlockPartition partition_blocks(int N, const SchemeConfig& scheme);

/// Per-element ON/OFF state and grid phase. Phases of OFF elements are 0.
struct RisPattern {
    std::vector<std::uint8_t> amplitude;
    std::vector<QuantizedPhase> phase;
};

/// Symbol decomposition. Layers are 1-based; 0 marks a field the scheme
/// does not use. The integer label is v-major: APSK index = v*(M/V) + (l-1),
/// QAPSK index = v*(M/V) + (l1-1)*sqrt(M/V) + (l2-1), PSK index = m.
struct SymbolLabel {
    int m = 0;
    int l = 0;
    int l1 = 0;
    int l2 = 0;
    int v = 0;

    friend bool operator==(const SymbolLabel&, const SymbolLabel&) = default;
};

SymbolLabel decode_label(const SchemeConfig& scheme, int index);
int encode_label(const SchemeConfig& scheme, const SymbolLabel& label);

RisPattern psk_pattern(std::span<const cdouble> g, int m, int M, int B);
RisPattern apsk_pattern(std::span<const cdouble> g, const BlockPartition& part, int l, int v,
                        const SchemeConfig& scheme, int B);
RisPattern qapsk_pattern(std::span<const cdouble> g, const BlockPartition& part, int l1, int l2, int v,
                         const SchemeConfig& scheme, int B);

/// Pattern of the symbol with integer label `index`.
RisPattern pattern_for(std::span<const cdouble> g, const BlockPartition& part, const SchemeConfig& scheme,
                       int B, int index);

/// g . Theta: sum over ON elements of g_n e^{j theta_n}.
cdouble received_point(std::span<const cdouble> g, const RisPattern& pattern);

struct ConstellationSet {
    SchemeConfig scheme;
    std::vector<cdouble> points;       // indexed by integer label
    std::vector<SymbolLabel> labels;
    std::vector<cdouble> block_gains;  // PSK: {X}; APSK: X_1..X_{M/V}
    std::vector<cdouble> block_gains_i;
    std::vector<cdouble> block_gains_q;  // already de-rotated by e^{-j2pi/V}

    std::size_t size() const noexcept { return points.size(); }
};

/// Received-signal set for a channel realization, built point by point from
/// the RIS patterns. Block gains are filled from the v = 0 patterns.
ConstellationSet received_signal_set(std::span<const cdouble> g, const SchemeConfig& scheme,
                                     const BlockPartition& part, int B);

/// Builds the APSK/QAPSK point set from block gains alone:
/// APSK  e^{j2pi v/V} sum_{l'<=l} X_l'
/// QAPSK e^{j2pi v/V} (sum_{l'<=l1} X^I_l' + e^{j2pi/V} sum_{l'<=l2} X^Q_l')
/// For QAPSK pass the Q gains in `gains_q`; for APSK leave it empty.
ConstellationSet assemble_constellation(const SchemeConfig& scheme, std::span<const cdouble> gains,
                                        std::span<const cdouble> gains_q = {});

} // namespace rismod
