use crate::domain::Schema;

use super::{ActionSet, ActionTemplate, DialogueState};

/// Hand-written slot-filling baseline. No confirmations, no error recovery.
///
/// Priority: (1) answer a pending user request when exactly one record matches;
/// (2) request the first informable slot, in schema order, that has neither a tracked
/// value nor been asked already; (3) book once every askable slot is covered and
/// something matches; (4) close.
pub fn rule_policy(state: &DialogueState, schema: &Schema, actions: &ActionSet) -> usize {
    let index = |t: ActionTemplate| actions.index_of(&t).expect("template in inventory");

    if state.kb_match_count() == 1 {
        for slot in schema.informable() {
            if state.user_requests().contains(slot) && !state.answered().contains(slot) {
                return index(ActionTemplate::Inform(slot.to_string()));
            }
        }
    }
    let askable = || schema.informable().filter(|s| schema.is_requestable(s));
    for slot in askable() {
        if !state.constraints().contains_key(slot) && !state.agent_requested().contains(slot) {
            return index(ActionTemplate::Request(slot.to_string()));
        }
    }
    let covered = askable().all(|s| state.constraints().contains_key(s) || state.agent_requested().contains(s));
    if covered && state.kb_match_count() >= 1 {
        return index(ActionTemplate::Book);
    }
    index(ActionTemplate::Closing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{DialogueAct, FineIntent, KnowledgeBase, Speaker, ANYTHING};
    use crate::manager::reset_tracker;

    fn setup() -> (Schema, KnowledgeBase, ActionSet) {
        let schema = Schema::movie();
        let kb = KnowledgeBase::synthesize(&schema, 7, 30).unwrap();
        let actions = ActionSet::new(&schema);
        (schema, kb, actions)
    }

    #[test]
    fn asks_first_unknown_slot_in_schema_order() {
        let (schema, kb, actions) = setup();
        let mut state = reset_tracker(&kb);
        let movie = kb.records()[0].get("moviename").unwrap();
        let first = DialogueAct::new(Speaker::User, FineIntent::inform("moviename"))
            .with_inform("moviename", movie)
            .with_request("ticket");
        state.track_user(&first, &kb);
        let a = rule_policy(&state, &schema, &actions);
        assert_eq!(actions.get(a), &ActionTemplate::Request("starttime".into()));
        assert_eq!(a, rule_policy(&state, &schema, &actions));
    }

    fn fully_constrained(kb: &KnowledgeBase, values: &[(&str, &str)]) -> DialogueState {
        let mut state = reset_tracker(kb);
        let mut act = DialogueAct::new(Speaker::User, FineIntent::inform("moviename"));
        for (k, v) in values {
            act = act.with_inform(k, v);
        }
        state.track_user(&act, kb);
        state
    }

    #[test]
    fn books_when_everything_known_and_one_match() {
        let (schema, kb, actions) = setup();
        let r = &kb.records()[2];
        let values: Vec<(&str, &str)> = schema.record_slots().map(|s| (s, r.get(s).unwrap())).collect();
        let state = fully_constrained(&kb, &values);
        assert!(state.kb_match_count() >= 1);
        assert_eq!(actions.get(rule_policy(&state, &schema, &actions)), &ActionTemplate::Book);
    }

    #[test]
    fn closes_when_nothing_matches() {
        let (schema, kb, actions) = setup();
        let values: Vec<(&str, &str)> = schema.record_slots().map(|s| (s, "nowhere")).collect();
        let state = fully_constrained(&kb, &values);
        assert_eq!(state.kb_match_count(), 0);
        assert_eq!(actions.get(rule_policy(&state, &schema, &actions)), &ActionTemplate::Closing);
    }

    #[test]
    fn answers_requests_only_on_a_unique_match() {
        let (schema, kb, actions) = setup();
        let r = &kb.records()[2];
        let mut values: Vec<(&str, &str)> = schema.record_slots().map(|s| (s, r.get(s).unwrap())).collect();
        let state = {
            let mut s = fully_constrained(&kb, &values);
            s.track_user(&DialogueAct::request(Speaker::User, "theater"), &kb);
            s
        };
        if state.kb_match_count() == 1 {
            assert_eq!(actions.get(rule_policy(&state, &schema, &actions)), &ActionTemplate::Inform("theater".into()));
        }
        // wildcard everything but the movie: many matches, so no answer
        for v in values.iter_mut().skip(1) {
            v.1 = ANYTHING;
        }
        let mut state = fully_constrained(&kb, &values);
        state.track_user(&DialogueAct::request(Speaker::User, "theater"), &kb);
        assert!(state.kb_match_count() > 1);
        assert_eq!(actions.get(rule_policy(&state, &schema, &actions)), &ActionTemplate::Book);
    }
}
