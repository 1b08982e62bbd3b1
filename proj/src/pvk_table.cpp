#include "ewave/pvk_table.hpp"

#include "ewave/errors.hpp"
#include "ewave/rng.hpp"
#include "ewave/waveform.hpp"

#include <cmath>
#include <set>

namespace ewave::protocol {

PvkTable::PvkTable(std::vector<Code> entries) : entries_(std::move(entries)), used_(entries_.size(), 0)
{
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.empty() || e.size() > waveform::kMaxPayloadBytes) {
            throw InvalidArgument("table entry " + std::to_string(i) + " must be 1..64 bytes");
        }
        if (!index_.emplace(e, i).second) {
            throw InvalidArgument("table entry " + std::to_string(i) + " duplicates an earlier entry");
        }
    }
}

void PvkTable::mark_used(std::size_t index)
{
    if (used_.at(index) != 0) {
        return;
    }
    used_[index] = 1;
    ++used_count_;
    while (cursor_ < used_.size() && used_[cursor_] != 0) {
        ++cursor_;
    }
}

std::optional<std::size_t> PvkTable::find(const Code& code) const
{
    auto it = index_.find(code);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::pair<std::size_t, Code> next_key(const PvkTable& table)
{
    if (table.cursor() >= table.size()) {
        throw TableExhausted("no unused private key left in the table");
    }
    return {table.cursor(), table.entry(table.cursor())};
}

PvkTable generate_table(std::size_t n_keys, std::size_t key_len_bytes, std::uint64_t rng_seed)
{
    if (n_keys == 0) {
        throw InvalidArgument("table needs at least one key");
    }
    if (key_len_bytes == 0 || key_len_bytes > waveform::kMaxPayloadBytes) {
        throw InvalidArgument("key length must be 1..64 bytes");
    }
    // 256^len distinct codes; only short keys can run out.
    if (key_len_bytes < 8) {
        const std::uint64_t capacity = std::uint64_t{1} << (8 * key_len_bytes);
        if (n_keys > capacity) {
            throw CapacityError("cannot draw " + std::to_string(n_keys) + " distinct " + std::to_string(key_len_bytes)
                                + "-byte keys (only " + std::to_string(capacity) + " exist)");
        }
    }

    Rng rng(rng_seed);
    std::set<Code> seen;
    std::vector<Code> entries;
    entries.reserve(n_keys);
    while (entries.size() < n_keys) {
        Code c(key_len_bytes);
        for (auto& b : c) {
            b = rng.next_byte();
        }
        if (seen.insert(c).second) {
            entries.push_back(std::move(c));
        }
    }
    return PvkTable(std::move(entries));
}

} // namespace ewave::protocol
