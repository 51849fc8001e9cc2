use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DomainError;

/// Communicative function of a dialogue act, before slot specialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseIntent {
    Greeting,
    Thanks,
    Closing,
    Deny,
    ConfirmQuestion,
    ConfirmAnswer,
    Inform,
    Request,
}

impl BaseIntent {
    /// Every base intent, in the fixed order used for feature encoding.
    pub const ALL: [BaseIntent; 8] = [
        BaseIntent::Greeting,
        BaseIntent::Thanks,
        BaseIntent::Closing,
        BaseIntent::Deny,
        BaseIntent::ConfirmQuestion,
        BaseIntent::ConfirmAnswer,
        BaseIntent::Inform,
        BaseIntent::Request,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BaseIntent::Greeting => "greeting",
            BaseIntent::Thanks => "thanks",
            BaseIntent::Closing => "closing",
            BaseIntent::Deny => "deny",
            BaseIntent::ConfirmQuestion => "confirm_question",
            BaseIntent::ConfirmAnswer => "confirm_answer",
            BaseIntent::Inform => "inform",
            BaseIntent::Request => "request",
        }
    }

    pub fn group(self) -> IntentGroup {
        match self {
            BaseIntent::Inform => IntentGroup::Inform,
            BaseIntent::Request => IntentGroup::Request,
            _ => IntentGroup::General,
        }
    }

    /// Inform and request are specialized by an anchor slot.
    pub fn takes_anchor(self) -> bool {
        matches!(self, BaseIntent::Inform | BaseIntent::Request)
    }
}

impl fmt::Display for BaseIntent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaseIntent {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BaseIntent::ALL
            .iter()
            .copied()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| DomainError::UnknownIntent(s.to_string()))
    }
}

/// Three-way partition of intents used by the intent error model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntentGroup {
    /// greeting, thanks, closing, deny, confirmations
    General,
    Inform,
    Request,
}

/// A base intent bound to the slot it is about, e.g. `request_theater`.
///
/// The anchor is present exactly when the base intent is inform or request.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FineIntent {
    base: BaseIntent,
    anchor: Option<String>,
}

impl FineIntent {
    pub fn general(base: BaseIntent) -> Result<Self, DomainError> {
        if base.takes_anchor() {
            return Err(DomainError::MalformedIntent(format!("{base} requires an anchor slot")));
        }
        Ok(FineIntent { base, anchor: None })
    }

    pub fn inform(slot: impl Into<String>) -> Self {
        FineIntent { base: BaseIntent::Inform, anchor: Some(slot.into()) }
    }

    pub fn request(slot: impl Into<String>) -> Self {
        FineIntent { base: BaseIntent::Request, anchor: Some(slot.into()) }
    }

    pub fn base(&self) -> BaseIntent {
        self.base
    }

    pub fn anchor(&self) -> Option<&str> {
        self.anchor.as_deref()
    }

    pub fn group(&self) -> IntentGroup {
        self.base.group()
    }

    pub fn is_well_formed(&self) -> bool {
        self.base.takes_anchor() == self.anchor.is_some()
    }
}

/// Shorthand constructors for the anchor-free intents.
impl From<BaseIntent> for FineIntent {
    fn from(base: BaseIntent) -> Self {
        assert!(!base.takes_anchor(), "{base} needs an anchor slot");
        FineIntent { base, anchor: None }
    }
}

impl fmt::Display for FineIntent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.anchor {
            Some(slot) => write!(f, "{}_{}", self.base, slot),
            None => write!(f, "{}", self.base),
        }
    }
}

pub fn intent_group(intent: &FineIntent) -> IntentGroup {
    intent.group()
}
