#include "tdcheck/trace_validator.hpp"

namespace tdcheck
{

std::string_view reject_reason_name( RejectReason r )
{
    switch( r )
    {
    case RejectReason::BadInitialState:
        return "bad-initial-state";
    case RejectReason::LabelNotEnabled:
        return "label-not-enabled";
    case RejectReason::PostStateMismatch:
        return "post-state-mismatch";
    case RejectReason::TypeError:
        return "type-error";
    }
    return "type-error";
}

json ValidationVerdict::to_json() const
{
    json j;
    j[ "schema" ] = "tdcheck.validation/1";
    j[ "accepted" ] = accepted;
    j[ "failing_index" ] = failing_index ? json( *failing_index ) : json( nullptr );
    j[ "reason" ] = reason ? json( reject_reason_name( *reason ) ) : json( nullptr );
    j[ "message" ] = message;
    j[ "expected_successors" ] = expected_successors;
    j[ "checked_events" ] = checked_events;
    return j;
}

ValidationVerdict validate_trace( const Trace& trace, bool allow_stutter, bool label_free )
{
    if( trace.instance.name == "abstract" )
    {
        AbstractSpec spec{ trace.instance };
        return label_free ? validate_label_free( spec, trace ) : validate( spec, trace, allow_stutter );
    }
    SafraSpec spec{ trace.instance };
    return label_free ? validate_label_free( spec, trace ) : validate( spec, trace, allow_stutter );
}

} // namespace tdcheck
