#include "tdcheck/state_store.hpp"

#include <cstring>
#include <limits>
#include <stdexcept>

namespace tdcheck
{

StateStore::StateStore( std::size_t encoded_size, StoreMode mode )
    : _stride{ mode == StoreMode::Exact ? encoded_size : sizeof( std::uint64_t ) }, _mode{ mode }
{
    _slots.assign( 1024, 0 );
    _mask = _slots.size() - 1;
}

std::string_view StateStore::key_of( std::string_view encoding, std::uint64_t hash, char* scratch ) const
{
    if( _mode == StoreMode::Exact )
        return encoding;
    std::memcpy( scratch, &hash, sizeof hash );
    return { scratch, sizeof hash };
}

std::string_view StateStore::key( std::uint32_t index ) const
{
    return std::string_view{ _keys }.substr( static_cast<std::size_t>( index ) * _stride, _stride );
}

std::int64_t StateStore::find( std::string_view encoding, std::uint64_t hash ) const
{
    char scratch[ 8 ];
    auto k = key_of( encoding, hash, scratch );
    for( std::size_t slot = hash & _mask;; slot = ( slot + 1 ) & _mask )
    {
        std::uint32_t v = _slots[ slot ];
        if( v == 0 )
            return -1;
        std::uint32_t idx = v - 1;
        if( _hashes[ idx ] == hash && key( idx ) == k )
            return idx;
    }
}

std::pair<bool, std::uint32_t> StateStore::insert( std::string_view encoding, std::uint64_t hash,
                                                   std::uint64_t parent, std::uint32_t step )
{
    if( _mode == StoreMode::Exact && encoding.size() != _stride )
        throw std::invalid_argument( "state encoding has unexpected width" );
    char scratch[ 8 ];
    auto k = key_of( encoding, hash, scratch );
    std::size_t slot = hash & _mask;
    for( ;; slot = ( slot + 1 ) & _mask )
    {
        std::uint32_t v = _slots[ slot ];
        if( v == 0 )
            break;
        std::uint32_t idx = v - 1;
        if( _hashes[ idx ] == hash && key( idx ) == k )
            return { false, idx };
    }
    if( _parent.size() >= std::numeric_limits<std::uint32_t>::max() - 1 )
        throw std::length_error( "state store shard is full" );
    auto idx = static_cast<std::uint32_t>( _parent.size() );
    _keys.append( k );
    _hashes.push_back( hash );
    _parent.push_back( parent );
    _step.push_back( step );
    _slots[ slot ] = idx + 1;
    if( _parent.size() * 2 > _slots.size() )
        grow();
    return { true, idx };
}

void StateStore::grow()
{
    std::vector<std::uint32_t> slots( _slots.size() * 2, 0 );
    std::size_t mask = slots.size() - 1;
    for( std::uint32_t idx = 0; idx < _hashes.size(); ++idx )
    {
        std::size_t slot = _hashes[ idx ] & mask;
        while( slots[ slot ] != 0 )
            slot = ( slot + 1 ) & mask;
        slots[ slot ] = idx + 1;
    }
    _slots = std::move( slots );
    _mask = mask;
}

ShardedStateStore::ShardedStateStore( std::size_t encoded_size, StoreMode mode, std::size_t shard_bits )
    : _shard_bits{ shard_bits }
{
    for( std::size_t i = 0; i < ( std::size_t{ 1 } << shard_bits ); ++i )
        _shards.push_back( std::make_unique<Shard>( encoded_size, mode ) );
}

std::pair<bool, std::uint64_t> ShardedStateStore::insert( std::string_view encoding, std::uint64_t hash,
                                                          std::uint64_t parent, std::uint32_t step )
{
    // High bits pick the shard; the shard's table probes with the low bits.
    std::size_t shard = _shard_bits ? hash >> ( 64 - _shard_bits ) : 0;
    auto& s = *_shards[ shard ];
    std::lock_guard guard{ s.lock };
    auto [inserted, idx] = s.store.insert( encoding, hash, parent, step );
    return { inserted, ( static_cast<std::uint64_t>( shard ) << 32 ) | idx };
}

std::size_t ShardedStateStore::size() const
{
    std::size_t total = 0;
    for( const auto& s : _shards )
        total += s->store.size();
    return total;
}

std::uint64_t ShardedStateStore::parent( std::uint64_t id ) const
{
    return _shards[ id >> 32 ]->store.parent( static_cast<std::uint32_t>( id ) );
}

std::uint32_t ShardedStateStore::step( std::uint64_t id ) const
{
    return _shards[ id >> 32 ]->store.step( static_cast<std::uint32_t>( id ) );
}

} // namespace tdcheck
