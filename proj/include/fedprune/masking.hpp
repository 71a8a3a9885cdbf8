#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fedprune/matrix.hpp"

namespace fedprune {

/// Scope in which top-k selection runs: the whole layer, each row, or
/// each column of the weight matrix.
enum class ComparisonGroup { Layer, Row, Column };

ComparisonGroup group_from_name(std::string_view name);
std::string_view group_name(ComparisonGroup g);

/// Binary pruning mask, row-major, 1 = pruned.
struct MaskMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> bits;

    MaskMatrix() = default;
    MaskMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), bits(r * c, 0) {}

    std::uint8_t& at(std::size_t r, std::size_t c) { return bits[r * cols + c]; }
    std::uint8_t at(std::size_t r, std::size_t c) const { return bits[r * cols + c]; }
    std::size_t popcount() const;
    bool operator==(const MaskMatrix&) const = default;
};

/// Entrywise sum of client masks; votes[e] = number of clients that want
/// entry e pruned, in [0, client_count].
struct AggregatedMask {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint32_t> votes;
    std::uint32_t client_count = 0;

    std::uint32_t at(std::size_t r, std::size_t c) const { return votes[r * cols + c]; }
    bool operator==(const AggregatedMask&) const = default;
};

/// Per group, marks the floor(sparsity·group_size) entries with the lowest
/// scores; ties broken by ascending row-major index.
MaskMatrix mask_from_scores(const Matrix& scores, double sparsity, ComparisonGroup group);

AggregatedMask aggregate_masks(std::span<const MaskMatrix> masks);

/// Per group, marks the floor(sparsity·group_size) entries with the highest
/// vote counts; ties broken by ascending row-major index.
MaskMatrix select_final_mask(const AggregatedMask& agg, double sparsity, ComparisonGroup group);

/// Retained-weight consensus scaling: out = w_pruned ⊙ (m − votes)/m.
/// `final_mask` entries must already be zeroed in w_pruned.
Matrix scale_retained(const Matrix& w_pruned, const AggregatedMask& agg,
                      const MaskMatrix& final_mask);

/// Number of entries selected per group instance at the given sparsity.
std::size_t group_select_count(double sparsity, std::size_t group_size);

// --- wire encoding ---------------------------------------------------------
// Masks travel packed: row-major bit order, MSB-first within each byte,
// final byte zero-padded. ceil(rows·cols/8) bytes.

std::vector<std::uint8_t> pack_mask(const MaskMatrix& mask);
MaskMatrix unpack_mask(std::span<const std::uint8_t> bytes, std::size_t rows, std::size_t cols);

/// Bits per vote-count entry on the wire: ceil(log2(m+1)).
unsigned vote_bit_width(std::uint32_t client_count);

/// Vote counts travel as fixed-width entries of vote_bit_width(m) bits
/// each, row-major, MSB-first, zero-padded.
std::vector<std::uint8_t> pack_votes(const AggregatedMask& agg);
AggregatedMask unpack_votes(std::span<const std::uint8_t> bytes, std::size_t rows,
                            std::size_t cols, std::uint32_t client_count);

/// Protocol frame: {layer_index, rows, cols, client_id} as u32 little-endian,
/// then the packed mask bits.
inline constexpr std::size_t kMaskFrameHeaderBytes = 16;

std::vector<std::uint8_t> encode_mask_frame(std::uint32_t layer_index, std::uint32_t client_id,
                                            const MaskMatrix& mask);

struct MaskFrame {
    std::uint32_t layer_index = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::uint32_t client_id = 0;
    MaskMatrix mask;
};

MaskFrame decode_mask_frame(std::span<const std::uint8_t> frame);

}  // namespace fedprune
