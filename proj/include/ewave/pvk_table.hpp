#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace ewave::protocol {

using Code = std::vector<std::uint8_t>;

/// Private-key table provisioned identically on the node and the
/// communication node. Each entry authenticates at most once; the used
/// flags are the replay defense.
///
/// Not thread-safe: the owner serializes mark_used().
class PvkTable {
public:
    PvkTable() = default;
    /// Throws InvalidArgument on duplicate entries or entry length outside
    /// [1, 64].
    explicit PvkTable(std::vector<Code> entries);

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Code& entry(std::size_t index) const { return entries_.at(index); }
    const std::vector<Code>& entries() const { return entries_; }

    bool is_used(std::size_t index) const { return used_.at(index) != 0; }
    void mark_used(std::size_t index);

    /// First unused index, or size() when exhausted.
    std::size_t cursor() const { return cursor_; }
    std::size_t unused_count() const { return size() - used_count_; }

    std::optional<std::size_t> find(const Code& code) const;

private:
    std::vector<Code> entries_;
    std::vector<std::uint8_t> used_;
    std::map<Code, std::size_t> index_;
    std::size_t cursor_ = 0;
    std::size_t used_count_ = 0;
};

/// Entry at the cursor, without marking it. Throws TableExhausted.
std::pair<std::size_t, Code> next_key(const PvkTable& table);

/// `n_keys` distinct random codes of `key_len_bytes` each. The same seed
/// always gives the same table. Throws CapacityError when more keys are
/// requested than distinct codes exist.
PvkTable generate_table(std::size_t n_keys, std::size_t key_len_bytes, std::uint64_t rng_seed);

} // namespace ewave::protocol
