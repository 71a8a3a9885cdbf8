#include "fedprune/masking.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "fedprune/errors.hpp"

namespace fedprune {

ComparisonGroup group_from_name(std::string_view name) {
    if (name == "layer") return ComparisonGroup::Layer;
    if (name == "row") return ComparisonGroup::Row;
    if (name == "column") return ComparisonGroup::Column;
    throw InputDomainError("unknown comparison group: " + std::string(name));
}

std::string_view group_name(ComparisonGroup g) {
    switch (g) {
        case ComparisonGroup::Layer: return "layer";
        case ComparisonGroup::Row: return "row";
        case ComparisonGroup::Column: return "column";
    }
    return "?";
}

std::size_t MaskMatrix::popcount() const {
    return static_cast<std::size_t>(std::accumulate(bits.begin(), bits.end(), std::size_t{0}));
}

std::size_t group_select_count(double sparsity, std::size_t group_size) {
    if (sparsity < 0.0 || sparsity > 1.0) {
        throw InputDomainError("sparsity must lie in [0,1], got " + std::to_string(sparsity));
    }
    auto k = static_cast<std::size_t>(std::floor(sparsity * static_cast<double>(group_size)));
    return std::min(k, group_size);
}

namespace {

// Enumerates the flat indices of each group instance in ascending order.
template <typename Fn>
void for_each_group(std::size_t rows, std::size_t cols, ComparisonGroup group, Fn&& fn) {
    std::vector<std::uint32_t> idx;
    switch (group) {
        case ComparisonGroup::Layer: {
            idx.resize(rows * cols);
            std::iota(idx.begin(), idx.end(), 0u);
            fn(idx);
            break;
        }
        case ComparisonGroup::Row: {
            idx.resize(cols);
            for (std::size_t r = 0; r < rows; ++r) {
                std::iota(idx.begin(), idx.end(), static_cast<std::uint32_t>(r * cols));
                fn(idx);
            }
            break;
        }
        case ComparisonGroup::Column: {
            idx.resize(rows);
            for (std::size_t c = 0; c < cols; ++c) {
                for (std::size_t r = 0; r < rows; ++r) {
                    idx[r] = static_cast<std::uint32_t>(r * cols + c);
                }
                fn(idx);
            }
            break;
        }
    }
}

// Partitions so the first k indices are exactly the k least elements under
// cmp (a strict total order thanks to the index tie-break), then marks them.
template <typename Cmp>
void mark_selected(MaskMatrix& mask, std::vector<std::uint32_t>& idx, std::size_t k, Cmp cmp) {
    if (k == 0) return;
    if (k < idx.size()) {
        std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k) - 1,
                         idx.end(), cmp);
    }
    for (std::size_t i = 0; i < k; ++i) mask.bits[idx[i]] = 1;
}

}  // namespace

MaskMatrix mask_from_scores(const Matrix& scores, double sparsity, ComparisonGroup group) {
    MaskMatrix mask(scores.rows(), scores.cols());
    const double* s = scores.data();
    auto lowest_first = [s](std::uint32_t a, std::uint32_t b) {
        if (s[a] != s[b]) return s[a] < s[b];
        return a < b;
    };
    for_each_group(scores.rows(), scores.cols(), group, [&](std::vector<std::uint32_t>& idx) {
        mark_selected(mask, idx, group_select_count(sparsity, idx.size()), lowest_first);
    });
    return mask;
}

AggregatedMask aggregate_masks(std::span<const MaskMatrix> masks) {
    if (masks.empty()) throw InputDomainError("aggregate_masks: empty mask sequence");
    AggregatedMask agg;
    agg.rows = masks[0].rows;
    agg.cols = masks[0].cols;
    agg.votes.assign(agg.rows * agg.cols, 0);
    agg.client_count = static_cast<std::uint32_t>(masks.size());
    for (const MaskMatrix& m : masks) {
        if (m.rows != agg.rows || m.cols != agg.cols) {
            throw ShapeError("aggregate_masks: mask shape mismatch");
        }
        for (std::size_t i = 0; i < m.bits.size(); ++i) agg.votes[i] += m.bits[i];
    }
    return agg;
}

MaskMatrix select_final_mask(const AggregatedMask& agg, double sparsity, ComparisonGroup group) {
    MaskMatrix mask(agg.rows, agg.cols);
    const std::uint32_t* v = agg.votes.data();
    auto highest_first = [v](std::uint32_t a, std::uint32_t b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return a < b;
    };
    for_each_group(agg.rows, agg.cols, group, [&](std::vector<std::uint32_t>& idx) {
        mark_selected(mask, idx, group_select_count(sparsity, idx.size()), highest_first);
    });
    return mask;
}

Matrix scale_retained(const Matrix& w_pruned, const AggregatedMask& agg,
                      const MaskMatrix& final_mask) {
    if (w_pruned.rows() != agg.rows || w_pruned.cols() != agg.cols ||
        final_mask.rows != agg.rows || final_mask.cols != agg.cols) {
        throw ShapeError("scale_retained: shape mismatch");
    }
    const double m = static_cast<double>(agg.client_count);
    Matrix out = w_pruned;
    double* o = out.data();
    for (std::size_t i = 0; i < agg.votes.size(); ++i) {
        o[i] *= (m - static_cast<double>(agg.votes[i])) / m;
    }
    return out;
}

std::vector<std::uint8_t> pack_mask(const MaskMatrix& mask) {
    const std::size_t n = mask.bits.size();
    std::vector<std::uint8_t> out((n + 7) / 8, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (mask.bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
    return out;
}

MaskMatrix unpack_mask(std::span<const std::uint8_t> bytes, std::size_t rows, std::size_t cols) {
    const std::size_t n = rows * cols;
    const std::size_t expected = (n + 7) / 8;
    if (bytes.size() != expected) {
        throw FormatError("unpack_mask: expected " + std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()));
    }
    MaskMatrix mask(rows, cols);
    for (std::size_t i = 0; i < n; ++i) {
        mask.bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1u;
    }
    return mask;
}

namespace {

class BitWriter {
public:
    void put(std::uint32_t value, unsigned width) {
        for (unsigned b = width; b-- > 0;) push_bit((value >> b) & 1u);
    }
    std::vector<std::uint8_t> finish() {
        if (fill_ > 0) {
            out_.push_back(static_cast<std::uint8_t>(cur_ << (8 - fill_)));
            cur_ = 0;
            fill_ = 0;
        }
        return std::move(out_);
    }

private:
    void push_bit(std::uint32_t bit) {
        cur_ = static_cast<std::uint8_t>((cur_ << 1) | bit);
        if (++fill_ == 8) {
            out_.push_back(cur_);
            cur_ = 0;
            fill_ = 0;
        }
    }
    std::vector<std::uint8_t> out_;
    std::uint8_t cur_ = 0;
    unsigned fill_ = 0;
};

class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
    std::uint32_t get(unsigned width) {
        std::uint32_t v = 0;
        for (unsigned b = 0; b < width; ++b) {
            v = (v << 1) | ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u);
            ++pos_;
        }
        return v;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32le(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
           (static_cast<std::uint32_t>(b[off + 2]) << 16) |
           (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

}  // namespace

unsigned vote_bit_width(std::uint32_t client_count) {
    // Values span 0..m, so ceil(log2(m+1)) bits.
    return static_cast<unsigned>(std::bit_width(client_count));
}

std::vector<std::uint8_t> pack_votes(const AggregatedMask& agg) {
    if (agg.client_count == 0) throw InputDomainError("pack_votes: client_count is zero");
    const unsigned width = vote_bit_width(agg.client_count);
    BitWriter w;
    for (std::uint32_t v : agg.votes) w.put(v, width);
    return w.finish();
}

AggregatedMask unpack_votes(std::span<const std::uint8_t> bytes, std::size_t rows,
                            std::size_t cols, std::uint32_t client_count) {
    if (client_count == 0) throw InputDomainError("unpack_votes: client_count is zero");
    const unsigned width = vote_bit_width(client_count);
    const std::size_t expected = (rows * cols * width + 7) / 8;
    if (bytes.size() != expected) {
        throw FormatError("unpack_votes: expected " + std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()));
    }
    AggregatedMask agg;
    agg.rows = rows;
    agg.cols = cols;
    agg.client_count = client_count;
    agg.votes.resize(rows * cols);
    BitReader r(bytes);
    for (auto& v : agg.votes) {
        v = r.get(width);
        if (v > client_count) {
            throw FormatError("unpack_votes: vote count " + std::to_string(v) +
                              " exceeds client count " + std::to_string(client_count));
        }
    }
    return agg;
}

std::vector<std::uint8_t> encode_mask_frame(std::uint32_t layer_index, std::uint32_t client_id,
                                            const MaskMatrix& mask) {
    std::vector<std::uint8_t> out;
    out.reserve(kMaskFrameHeaderBytes + (mask.bits.size() + 7) / 8);
    put_u32le(out, layer_index);
    put_u32le(out, static_cast<std::uint32_t>(mask.rows));
    put_u32le(out, static_cast<std::uint32_t>(mask.cols));
    put_u32le(out, client_id);
    auto packed = pack_mask(mask);
    out.insert(out.end(), packed.begin(), packed.end());
    return out;
}

MaskFrame decode_mask_frame(std::span<const std::uint8_t> frame) {
    if (frame.size() < kMaskFrameHeaderBytes) {
        throw FormatError("mask frame shorter than header");
    }
    MaskFrame f;
    f.layer_index = get_u32le(frame, 0);
    f.rows = get_u32le(frame, 4);
    f.cols = get_u32le(frame, 8);
    f.client_id = get_u32le(frame, 12);
    f.mask = unpack_mask(frame.subspan(kMaskFrameHeaderBytes), f.rows, f.cols);
    return f;
}

}  // namespace fedprune
