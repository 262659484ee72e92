"""Flip-bias ledger, winner criteria and bias bounds, both as closed forms and as replays."""
