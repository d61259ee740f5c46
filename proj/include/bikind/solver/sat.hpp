#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

namespace bikind::sat
{

// Literal encoding: 2*var for the positive, 2*var+1 for the negative phase.
using lit = std::uint32_t;

inline lit pos( std::uint32_t v ) { return v << 1; }
inline lit neg( lit l ) { return l ^ 1u; }
inline std::uint32_t var_of( lit l ) { return l >> 1; }
inline bool is_neg( lit l ) { return ( l & 1u ) != 0; }

enum class result
{
    sat,
    unsat,
    unknown,
};

// Conflict-driven clause learning with two watched literals, VSIDS, phase
// saving, Luby restarts and activity-based learnt clause deletion.
// Deterministic: no randomness anywhere.
class solver
{
public:
    std::uint32_t new_var();
    std::uint32_t num_vars() const { return static_cast< std::uint32_t >( assigns_.size() ); }

    // Only between solve calls; the solver is always at level 0 then.
    void add_clause( std::vector< lit > lits );

    result solve( std::chrono::steady_clock::time_point deadline );

    bool model_value( std::uint32_t v ) const { return model_[ v ]; }

    std::uint64_t conflicts() const { return conflicts_; }

private:
    static constexpr std::uint32_t no_reason = UINT32_MAX;
    static constexpr std::int8_t l_true = 1, l_false = 0, l_undef = 2;

    struct clause
    {
        std::vector< lit > lits;
        bool learnt = false;
        bool deleted = false;
        double activity = 0;
    };

    struct watcher
    {
        std::uint32_t cref;
        lit blocker;
    };

    std::int8_t value( lit l ) const
    {
        const std::int8_t v = assigns_[ var_of( l ) ];
        return v == l_undef ? l_undef : static_cast< std::int8_t >( v ^ static_cast< std::int8_t >( is_neg( l ) ) );
    }
    int decision_level() const { return static_cast< int >( trail_lim_.size() ); }

    void enqueue( lit l, std::uint32_t reason );
    std::uint32_t propagate();
    void analyze( std::uint32_t confl, std::vector< lit >& learnt, int& backjump );
    bool redundant( lit l ) const;
    void cancel_until( int level );
    void attach( std::uint32_t cref );
    bool locked( std::uint32_t cref ) const;
    void reduce_learnts();

    void bump_var( std::uint32_t v );
    void bump_clause( clause& c );
    void heap_up( std::size_t i );
    void heap_down( std::size_t i );
    void heap_insert( std::uint32_t v );
    std::uint32_t heap_pop();

    std::vector< clause > clauses_;
    std::vector< std::vector< watcher > > watches_; // by the literal that became false
    std::vector< std::int8_t > assigns_;
    std::vector< bool > phase_;
    std::vector< int > level_;
    std::vector< std::uint32_t > reason_;
    std::vector< lit > trail_;
    std::vector< std::size_t > trail_lim_;
    std::size_t qhead_ = 0;
    bool inconsistent_ = false;

    std::vector< double > activity_;
    double var_inc_ = 1.0;
    double clause_inc_ = 1.0;
    std::vector< std::uint32_t > heap_;
    std::vector< int > heap_index_; // -1 when absent

    std::vector< std::uint8_t > seen_;
    std::vector< bool > model_;
    std::size_t num_learnts_ = 0;
    std::uint64_t conflicts_ = 0;
};

} // namespace bikind::sat
