#include "bikind/solver/solver.hpp"

#include <functional>
#include <map>
#include <set>

namespace bikind
{

using namespace smt;

namespace
{

constexpr std::uint64_t max_assignments = std::uint64_t{ 1 } << 20;

struct conjunct
{
    term t;
    std::vector< var_key > vars;
};

class enum_backend : public backend
{
public:
    std::string id() const override { return "enum"; }

    solve_result solve( const query& q, std::chrono::milliseconds budget ) override
    {
        deadline_ = std::chrono::steady_clock::now() + budget;
        steps_ = 0;
        conjuncts_.clear();
        defs_.clear();
        free_.clear();

        std::vector< term > parts;
        if ( q.formula->o == op::and_ )
            parts = q.formula->args;
        else
            parts = { q.formula };

        // `x = t` with x not reachable from t through earlier definitions
        // fixes x; everything else is checked as soon as it is closed.
        auto depends_on = [ & ]( const term& t, const var_key& x ) {
            std::set< var_key > seen;
            std::function< bool( const term& ) > go = [ & ]( const term& u ) {
                for ( const auto& d : free_vars( u ) )
                {
                    const auto k = d.key();
                    if ( k == x )
                        return true;
                    if ( !seen.insert( k ).second )
                        continue;
                    if ( auto it = defs_.find( k ); it != defs_.end() && go( it->second.t ) )
                        return true;
                }
                return false;
            };
            return go( t );
        };
        for ( const auto& p : parts )
        {
            if ( p->o == op::eq )
            {
                for ( int side = 0; side < 2; ++side )
                {
                    const term& v = p->args[ side ];
                    const term& value = p->args[ 1 - side ];
                    if ( v->o != op::var )
                        continue;
                    const var_key k{ v->name, v->step };
                    if ( defs_.count( k ) || depends_on( value, k ) )
                        continue;
                    defs_.emplace( k, conjunct{ value, keys( value ) } );
                    goto next;
                }
            }
            conjuncts_.push_back( { p, keys( p ) } );
        next:;
        }

        std::set< var_key > free_set;
        for ( const auto& d : free_vars( q.formula ) )
            if ( !defs_.count( d.key() ) )
                free_set.insert( d.key() );
        std::uint64_t space = 1;
        for ( const auto& d : free_vars( q.formula ) )
        {
            if ( !free_set.count( d.key() ) )
                continue;
            free_.push_back( d );
            if ( d.width >= 21 || ( space << d.width ) > max_assignments )
            {
                solve_result r;
                r.reason = unknown_reason::too_large;
                r.detail = "free-variable domain exceeds 2^20 assignments";
                return r;
            }
            space <<= d.width;
        }

        model m;
        solve_result r;
        try
        {
            if ( search( 0, m ) )
            {
                r.status = sat_status::sat;
                r.model = m;
            }
            else
                r.status = sat_status::unsat;
        }
        catch ( const out_of_time& )
        {
            r.status = sat_status::unknown;
            r.reason = unknown_reason::timeout;
        }
        return r;
    }

private:
    struct out_of_time
    {
    };

    static std::vector< var_key > keys( const term& t )
    {
        std::vector< var_key > out;
        for ( const auto& d : free_vars( t ) )
            out.push_back( d.key() );
        return out;
    }

    static bool known( const std::vector< var_key >& vars, const model& m )
    {
        for ( const auto& k : vars )
            if ( !m.count( k ) )
                return false;
        return true;
    }

    // Computes every definition whose inputs are known; false if a closed
    // conjunct is violated.
    bool consistent( model& m ) const
    {
        bool progress = true;
        while ( progress )
        {
            progress = false;
            for ( const auto& [ k, d ] : defs_ )
                if ( !m.count( k ) && known( d.vars, m ) )
                {
                    m[ k ] = evaluate( d.t, m );
                    progress = true;
                }
        }
        for ( const auto& c : conjuncts_ )
            if ( known( c.vars, m ) && evaluate( c.t, m ) == 0 )
                return false;
        return true;
    }

    bool search( std::size_t index, model& m )
    {
        if ( ( ++steps_ & 1023 ) == 0 && std::chrono::steady_clock::now() >= deadline_ )
            throw out_of_time{};
        model local = m;
        if ( !consistent( local ) )
            return false;
        if ( index == free_.size() )
        {
            m = std::move( local );
            return true;
        }
        const auto& d = free_[ index ];
        const std::uint64_t count = std::uint64_t{ 1 } << d.width;
        for ( std::uint64_t v = 0; v < count; ++v )
        {
            model next = local;
            next[ d.key() ] = v;
            if ( search( index + 1, next ) )
            {
                m = std::move( next );
                return true;
            }
        }
        return false;
    }

    std::chrono::steady_clock::time_point deadline_;
    std::uint64_t steps_ = 0;
    std::vector< conjunct > conjuncts_;
    std::map< var_key, conjunct > defs_;
    std::vector< var_decl > free_;
};

} // namespace

std::unique_ptr< backend > make_enum_backend() { return std::make_unique< enum_backend >(); }

} // namespace bikind
