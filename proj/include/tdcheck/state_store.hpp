#pragma once

// Visited-state storage for explicit exploration. Keys are fixed-width
// canonical encodings (exact mode) or 64-bit fingerprints (digest mode).
// Each record also keeps how it was first reached: its parent record and the
// index of the successor (or initial state) that produced it, so traces can
// be rebuilt by replaying the deterministic successor function.

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tdcheck
{

inline constexpr std::uint64_t no_parent = ~0ull;

enum class StoreMode
{
    Exact,
    Digest,
};

class StateStore
{
public:
    StateStore( std::size_t encoded_size, StoreMode mode );

    // Returns (inserted, index). `hash` must be the fingerprint of `encoding`.
    std::pair<bool, std::uint32_t> insert( std::string_view encoding, std::uint64_t hash, std::uint64_t parent,
                                           std::uint32_t step );
    [[nodiscard]] std::int64_t find( std::string_view encoding, std::uint64_t hash ) const;

    [[nodiscard]] std::size_t size() const { return _parent.size(); }
    [[nodiscard]] std::uint64_t parent( std::uint32_t index ) const { return _parent[ index ]; }
    [[nodiscard]] std::uint32_t step( std::uint32_t index ) const { return _step[ index ]; }
    // Exact mode only.
    [[nodiscard]] std::string_view key( std::uint32_t index ) const;
    [[nodiscard]] StoreMode mode() const { return _mode; }

private:
    void grow();
    [[nodiscard]] std::string_view key_of( std::string_view encoding, std::uint64_t hash, char* scratch ) const;

    std::size_t _stride;
    StoreMode _mode;
    std::string _keys;
    std::vector<std::uint64_t> _hashes;
    std::vector<std::uint64_t> _parent;
    std::vector<std::uint32_t> _step;
    std::vector<std::uint32_t> _slots;
    std::size_t _mask = 0;
};

// Lock-per-shard concurrent wrapper. Record ids pack (shard, local index).
class ShardedStateStore
{
public:
    ShardedStateStore( std::size_t encoded_size, StoreMode mode, std::size_t shard_bits = 8 );

    std::pair<bool, std::uint64_t> insert( std::string_view encoding, std::uint64_t hash, std::uint64_t parent,
                                           std::uint32_t step );

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::uint64_t parent( std::uint64_t id ) const;
    [[nodiscard]] std::uint32_t step( std::uint64_t id ) const;

private:
    struct Shard
    {
        std::mutex lock;
        StateStore store;
        Shard( std::size_t stride, StoreMode mode ) : store{ stride, mode } {}
    };

    std::size_t _shard_bits;
    std::vector<std::unique_ptr<Shard>> _shards;
};

} // namespace tdcheck
