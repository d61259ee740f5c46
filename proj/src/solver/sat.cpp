#include "bikind/solver/sat.hpp"

#include <algorithm>

namespace bikind::sat
{

namespace
{

double luby( double y, std::uint64_t x )
{
    std::uint64_t size = 1;
    int seq = 0;
    while ( size < x + 1 )
    {
        ++seq;
        size = 2 * size + 1;
    }
    while ( size - 1 != x )
    {
        size = ( size - 1 ) >> 1;
        --seq;
        x = x % size;
    }
    double r = 1;
    for ( int i = 0; i < seq; ++i )
        r *= y;
    return r;
}

} // namespace

std::uint32_t solver::new_var()
{
    const auto v = static_cast< std::uint32_t >( assigns_.size() );
    assigns_.push_back( l_undef );
    phase_.push_back( false );
    level_.push_back( 0 );
    reason_.push_back( no_reason );
    activity_.push_back( 0 );
    heap_index_.push_back( -1 );
    seen_.push_back( 0 );
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert( v );
    return v;
}

void solver::add_clause( std::vector< lit > lits )
{
    if ( inconsistent_ )
        return;
    std::sort( lits.begin(), lits.end() );
    std::vector< lit > kept;
    for ( std::size_t i = 0; i < lits.size(); ++i )
    {
        const lit l = lits[ i ];
        if ( value( l ) == l_true || ( i + 1 < lits.size() && lits[ i + 1 ] == neg( l ) ) )
            return; // satisfied or tautology
        if ( value( l ) == l_false || ( !kept.empty() && kept.back() == l ) )
            continue;
        kept.push_back( l );
    }
    if ( kept.empty() )
    {
        inconsistent_ = true;
        return;
    }
    if ( kept.size() == 1 )
    {
        enqueue( kept[ 0 ], no_reason );
        if ( propagate() != no_reason )
            inconsistent_ = true;
        return;
    }
    clauses_.push_back( { std::move( kept ), false, false, 0 } );
    attach( static_cast< std::uint32_t >( clauses_.size() - 1 ) );
}

void solver::attach( std::uint32_t cref )
{
    const auto& c = clauses_[ cref ].lits;
    watches_[ c[ 0 ] ].push_back( { cref, c[ 1 ] } );
    watches_[ c[ 1 ] ].push_back( { cref, c[ 0 ] } );
}

void solver::enqueue( lit l, std::uint32_t reason )
{
    const auto v = var_of( l );
    assigns_[ v ] = is_neg( l ) ? l_false : l_true;
    level_[ v ] = decision_level();
    reason_[ v ] = reason;
    trail_.push_back( l );
}

std::uint32_t solver::propagate()
{
    while ( qhead_ < trail_.size() )
    {
        const lit false_lit = neg( trail_[ qhead_++ ] );
        auto& ws = watches_[ false_lit ];
        std::size_t i = 0, j = 0;
        while ( i < ws.size() )
        {
            const watcher w = ws[ i++ ];
            if ( value( w.blocker ) == l_true )
            {
                ws[ j++ ] = w;
                continue;
            }
            clause& c = clauses_[ w.cref ];
            if ( c.deleted )
                continue;
            auto& lits = c.lits;
            if ( lits[ 0 ] == false_lit )
                std::swap( lits[ 0 ], lits[ 1 ] );
            const lit first = lits[ 0 ];
            if ( first != w.blocker && value( first ) == l_true )
            {
                ws[ j++ ] = { w.cref, first };
                continue;
            }
            bool moved = false;
            for ( std::size_t k = 2; k < lits.size(); ++k )
                if ( value( lits[ k ] ) != l_false )
                {
                    std::swap( lits[ 1 ], lits[ k ] );
                    watches_[ lits[ 1 ] ].push_back( { w.cref, first } );
                    moved = true;
                    break;
                }
            if ( moved )
                continue;
            ws[ j++ ] = { w.cref, first };
            if ( value( first ) == l_false )
            {
                while ( i < ws.size() )
                    ws[ j++ ] = ws[ i++ ];
                ws.resize( j );
                qhead_ = trail_.size();
                return w.cref;
            }
            enqueue( first, w.cref );
        }
        ws.resize( j );
    }
    return no_reason;
}

bool solver::redundant( lit l ) const
{
    // Local minimisation: `l` is implied by literals already in the clause.
    const auto r = reason_[ var_of( l ) ];
    if ( r == no_reason )
        return false;
    const auto& lits = clauses_[ r ].lits;
    for ( std::size_t i = 1; i < lits.size(); ++i )
    {
        const auto v = var_of( lits[ i ] );
        if ( !seen_[ v ] && level_[ v ] > 0 )
            return false;
    }
    return true;
}

void solver::analyze( std::uint32_t confl, std::vector< lit >& learnt, int& backjump )
{
    learnt.assign( 1, 0 );
    int path = 0;
    lit p = 0;
    bool have_p = false;
    std::size_t index = trail_.size();

    do
    {
        clause& c = clauses_[ confl ];
        if ( c.learnt )
            bump_clause( c );
        for ( std::size_t i = have_p ? 1 : 0; i < c.lits.size(); ++i )
        {
            const lit q = c.lits[ i ];
            const auto v = var_of( q );
            if ( seen_[ v ] || level_[ v ] == 0 )
                continue;
            bump_var( v );
            seen_[ v ] = 1;
            if ( level_[ v ] >= decision_level() )
                ++path;
            else
                learnt.push_back( q );
        }
        while ( !seen_[ var_of( trail_[ --index ] ) ] )
        {
        }
        p = trail_[ index ];
        have_p = true;
        confl = reason_[ var_of( p ) ];
        seen_[ var_of( p ) ] = 0;
        --path;
    } while ( path > 0 );
    learnt[ 0 ] = neg( p );

    std::vector< lit > all( learnt.begin() + 1, learnt.end() );
    std::size_t keep = 1;
    for ( std::size_t i = 1; i < learnt.size(); ++i )
        if ( !redundant( learnt[ i ] ) )
            learnt[ keep++ ] = learnt[ i ];
    learnt.resize( keep );
    for ( lit l : all )
        seen_[ var_of( l ) ] = 0;

    backjump = 0;
    if ( learnt.size() > 1 )
    {
        std::size_t max_i = 1;
        for ( std::size_t i = 2; i < learnt.size(); ++i )
            if ( level_[ var_of( learnt[ i ] ) ] > level_[ var_of( learnt[ max_i ] ) ] )
                max_i = i;
        std::swap( learnt[ 1 ], learnt[ max_i ] );
        backjump = level_[ var_of( learnt[ 1 ] ) ];
    }
}

void solver::cancel_until( int level )
{
    if ( decision_level() <= level )
        return;
    for ( std::size_t i = trail_.size(); i > trail_lim_[ level ]; --i )
    {
        const auto v = var_of( trail_[ i - 1 ] );
        phase_[ v ] = assigns_[ v ] == l_true;
        assigns_[ v ] = l_undef;
        reason_[ v ] = no_reason;
        if ( heap_index_[ v ] < 0 )
            heap_insert( v );
    }
    trail_.resize( trail_lim_[ level ] );
    trail_lim_.resize( level );
    qhead_ = trail_.size();
}

bool solver::locked( std::uint32_t cref ) const
{
    const lit l = clauses_[ cref ].lits[ 0 ];
    return reason_[ var_of( l ) ] == cref && value( l ) == l_true;
}

void solver::reduce_learnts()
{
    std::vector< std::uint32_t > learnts;
    for ( std::uint32_t i = 0; i < clauses_.size(); ++i )
        if ( clauses_[ i ].learnt && !clauses_[ i ].deleted )
            learnts.push_back( i );
    std::sort( learnts.begin(), learnts.end(), [ & ]( std::uint32_t a, std::uint32_t b ) {
        if ( clauses_[ a ].activity != clauses_[ b ].activity )
            return clauses_[ a ].activity < clauses_[ b ].activity;
        return a < b;
    } );
    for ( std::size_t i = 0; i < learnts.size() / 2; ++i )
    {
        clause& c = clauses_[ learnts[ i ] ];
        if ( c.lits.size() > 2 && !locked( learnts[ i ] ) )
        {
            c.deleted = true;
            c.lits.clear();
            c.lits.shrink_to_fit();
            --num_learnts_;
        }
    }
}

void solver::bump_var( std::uint32_t v )
{
    if ( ( activity_[ v ] += var_inc_ ) > 1e100 )
    {
        for ( auto& a : activity_ )
            a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if ( heap_index_[ v ] >= 0 )
        heap_up( static_cast< std::size_t >( heap_index_[ v ] ) );
}

void solver::bump_clause( clause& c )
{
    if ( ( c.activity += clause_inc_ ) > 1e20 )
    {
        for ( auto& x : clauses_ )
            if ( x.learnt )
                x.activity *= 1e-20;
        clause_inc_ *= 1e-20;
    }
}

void solver::heap_up( std::size_t i )
{
    const auto v = heap_[ i ];
    while ( i > 0 )
    {
        const std::size_t parent = ( i - 1 ) / 2;
        if ( activity_[ heap_[ parent ] ] >= activity_[ v ] )
            break;
        heap_[ i ] = heap_[ parent ];
        heap_index_[ heap_[ i ] ] = static_cast< int >( i );
        i = parent;
    }
    heap_[ i ] = v;
    heap_index_[ v ] = static_cast< int >( i );
}

void solver::heap_down( std::size_t i )
{
    const auto v = heap_[ i ];
    for ( ;; )
    {
        std::size_t child = 2 * i + 1;
        if ( child >= heap_.size() )
            break;
        if ( child + 1 < heap_.size() && activity_[ heap_[ child + 1 ] ] > activity_[ heap_[ child ] ] )
            ++child;
        if ( activity_[ heap_[ child ] ] <= activity_[ v ] )
            break;
        heap_[ i ] = heap_[ child ];
        heap_index_[ heap_[ i ] ] = static_cast< int >( i );
        i = child;
    }
    heap_[ i ] = v;
    heap_index_[ v ] = static_cast< int >( i );
}

void solver::heap_insert( std::uint32_t v )
{
    heap_.push_back( v );
    heap_up( heap_.size() - 1 );
}

std::uint32_t solver::heap_pop()
{
    const auto top = heap_[ 0 ];
    heap_index_[ top ] = -1;
    heap_[ 0 ] = heap_.back();
    heap_.pop_back();
    if ( !heap_.empty() )
    {
        heap_index_[ heap_[ 0 ] ] = 0;
        heap_down( 0 );
    }
    return top;
}

result solver::solve( std::chrono::steady_clock::time_point deadline )
{
    if ( inconsistent_ )
        return result::unsat;

    std::size_t max_learnts = clauses_.size() / 3 + 2000;
    std::uint64_t restart = 0;
    std::vector< lit > learnt;

    for ( ;; )
    {
        const auto budget = static_cast< std::uint64_t >( luby( 2, restart++ ) * 100 );
        std::uint64_t local = 0;
        for ( ;; )
        {
            const auto confl = propagate();
            if ( confl != no_reason )
            {
                ++conflicts_;
                ++local;
                if ( decision_level() == 0 )
                {
                    inconsistent_ = true;
                    return result::unsat;
                }
                int backjump = 0;
                analyze( confl, learnt, backjump );
                cancel_until( backjump );
                if ( learnt.size() == 1 )
                    enqueue( learnt[ 0 ], no_reason );
                else
                {
                    clauses_.push_back( { learnt, true, false, 0 } );
                    const auto cref = static_cast< std::uint32_t >( clauses_.size() - 1 );
                    attach( cref );
                    bump_clause( clauses_[ cref ] );
                    ++num_learnts_;
                    enqueue( learnt[ 0 ], cref );
                }
                var_inc_ /= 0.95;
                clause_inc_ /= 0.999;

                if ( ( conflicts_ & 255 ) == 0 && std::chrono::steady_clock::now() >= deadline )
                {
                    cancel_until( 0 );
                    return result::unknown;
                }
                continue;
            }

            if ( local >= budget )
            {
                cancel_until( 0 );
                break;
            }
            if ( num_learnts_ >= max_learnts + trail_.size() )
            {
                reduce_learnts();
                max_learnts += max_learnts / 10;
            }

            std::uint32_t next = UINT32_MAX;
            while ( !heap_.empty() )
            {
                const auto v = heap_pop();
                if ( assigns_[ v ] == l_undef )
                {
                    next = v;
                    break;
                }
            }
            if ( next == UINT32_MAX )
            {
                model_.assign( assigns_.size(), false );
                for ( std::size_t v = 0; v < assigns_.size(); ++v )
                    model_[ v ] = assigns_[ v ] == l_true;
                cancel_until( 0 );
                return result::sat;
            }
            trail_lim_.push_back( trail_.size() );
            enqueue( phase_[ next ] ? pos( next ) : neg( pos( next ) ), no_reason );
        }
    }
}

} // namespace bikind::sat
