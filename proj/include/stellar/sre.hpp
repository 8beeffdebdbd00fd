#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stellar/error.hpp"

namespace stellar {

using index_t = std::int32_t;
using count_t = std::uint64_t;

/// Sequential Range Encoding of an integer index list.
///
/// A non-negative entry is a literal index. A negative entry -s opens a run
/// starting at s; the entry that follows is a count c >= 1 and the run covers
/// the c+1 consecutive indices s, s+1, ..., s+c. So [-1,3] decodes to
/// 1,2,3,4 and [-40,4] to 40,...,44.
///
/// Because -0 is not representable, a run can never start at index 0: a
/// maximal stretch beginning at 0 keeps the 0 as a literal and compresses the
/// remainder. Stretches of length <= 2 stay literal (a run costs two entries,
/// so there is nothing to gain).
class SreList {
public:
    SreList() = default;

    explicit SreList(std::vector<index_t> raw_entries) : entries_(std::move(raw_entries)) {
        validate();
    }

    /// Builds the minimal-entry list for a strictly ascending index sequence.
    static SreList compress(std::span<const index_t> sorted) {
        SreList out;
        for (std::size_t i = 0; i < sorted.size();) {
            require(sorted[i] >= 0, errc::precondition, "sre_compress: negative index");
            if (i > 0)
                require(sorted[i] > sorted[i - 1], errc::precondition,
                        "sre_compress: input not strictly ascending");
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[j] + 1) ++j;
            out.emit_stretch(sorted[i], static_cast<index_t>(j - i + 1));
            i = j + 1;
        }
        return out;
    }

    /// Appends one index, extending or forming a tail run when the list tail
    /// decodes to index-1. Folding this over an ascending sequence yields the
    /// same entries as compress().
    void append(index_t value) {
        require(value >= 0, errc::parameter, "sre_append: negative index");
        const std::size_t n = entries_.size();
        if (n >= 2 && entries_[n - 2] < 0) {
            // tail is a run [s, s+c]
            const index_t run_end = -entries_[n - 2] + entries_[n - 1];
            if (value == run_end + 1) {
                ++entries_[n - 1];
                return;
            }
        } else if (n >= 1 && entries_[n - 1] >= 0 && entries_[n - 1] == value - 1) {
            const bool prev_is_literal =
                n >= 2 && entries_[n - 2] >= 0 && (n == 2 || entries_[n - 3] >= 0);
            if (prev_is_literal && entries_[n - 2] >= 1 && entries_[n - 2] == value - 2) {
                // fold the two tail literals plus value into a run
                entries_[n - 2] = -(value - 2);
                entries_[n - 1] = 2;
                return;
            }
        }
        entries_.push_back(value);
    }

    /// Appends a literal entry unconditionally (no run merging). Used by the
    /// explicit encodings, where every reference must stay one entry.
    void push_literal(index_t value) {
        require(value >= 0, errc::parameter, "push_literal: negative index");
        entries_.push_back(value);
    }

    /// Decoded element count, from run headers alone.
    count_t size() const {
        count_t total = 0;
        for (std::size_t t = 0; t < entries_.size();) {
            if (entries_[t] < 0) {
                require(t + 1 < entries_.size(), errc::corruption, "run header at list tail");
                require(entries_[t + 1] >= 1, errc::corruption, "run count below 1");
                total += static_cast<count_t>(entries_[t + 1]) + 1;
                t += 2;
            } else {
                total += 1;
                t += 1;
            }
        }
        return total;
    }

    /// Visits decoded indices in stored order.
    template <class F>
    void for_each(F&& fn) const {
        for (std::size_t t = 0; t < entries_.size();) {
            if (entries_[t] < 0) {
                require(t + 1 < entries_.size(), errc::corruption, "run header at list tail");
                const index_t start = -entries_[t];
                const index_t c = entries_[t + 1];
                require(c >= 1, errc::corruption, "run count below 1");
                for (index_t v = start; v <= start + c; ++v) fn(v);
                t += 2;
            } else {
                fn(entries_[t]);
                t += 1;
            }
        }
    }

    std::vector<index_t> decode() const {
        std::vector<index_t> out;
        out.reserve(static_cast<std::size_t>(size()));
        for_each([&](index_t v) { out.push_back(v); });
        return out;
    }

    bool is_run_header(std::size_t pos) const {
        return pos < entries_.size() && entries_[pos] < 0;
    }

    /// Expands the run headed at `pos` in place: the header pair is replaced
    /// by the run's first two values and the remaining values are appended at
    /// the end of the list. The decoded multiset is unchanged.
    void expand_run_at(std::size_t pos) {
        require(is_run_header(pos), errc::usage, "expand: position is not a run header");
        const index_t start = -entries_[pos];
        const index_t c = entries_[pos + 1];
        require(c >= 1, errc::corruption, "run count below 1");
        entries_[pos] = start;
        entries_[pos + 1] = start + 1;
        for (index_t v = start + 2; v <= start + c; ++v) entries_.push_back(v);
    }

    std::size_t entry_count() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::span<const index_t> entries() const { return entries_; }
    void clear() { entries_.clear(); }

    bool operator==(const SreList&) const = default;

private:
    void emit_stretch(index_t start, index_t len) {
        if (start == 0) {
            entries_.push_back(0);
            --len;
            ++start;
        }
        if (len >= 3) {
            entries_.push_back(-start);
            entries_.push_back(len - 1);
        } else {
            for (index_t k = 0; k < len; ++k) entries_.push_back(start + k);
        }
    }

    void validate() const {
        for (std::size_t t = 0; t < entries_.size(); ++t) {
            if (entries_[t] < 0) {
                require(t + 1 < entries_.size(), errc::corruption, "run header at list tail");
                require(entries_[t + 1] >= 1, errc::corruption, "run count below 1");
                ++t;
            }
        }
    }

    std::vector<index_t> entries_;
};

} // namespace stellar
