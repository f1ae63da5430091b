//! Scheme identifiers shared by the drivers, the CLI, and the analysis
//! tools.

/// Time stepper families implemented in this crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Cat2Trap,
    Cat2Tay,
    ImexRk2,
    FirstOrder,
}

impl SchemeKind {
    pub fn label(self) -> &'static str {
        match self {
            SchemeKind::Cat2Trap => "cat2_trap",
            SchemeKind::Cat2Tay => "cat2_tay",
            SchemeKind::ImexRk2 => "imex_rk2",
            SchemeKind::FirstOrder => "first_order",
        }
    }
}

/// A scheme choice plus whether the a-posteriori order-adaptation wrapper
/// is applied on top.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub mood: bool,
}

impl SchemeSpec {
    pub fn parse(s: &str) -> Option<SchemeSpec> {
        let (kind, mood) = match s {
            "cat2_trap" => (SchemeKind::Cat2Trap, false),
            "cat2_tay" => (SchemeKind::Cat2Tay, false),
            "imex_rk2" => (SchemeKind::ImexRk2, false),
            "first_order" => (SchemeKind::FirstOrder, false),
            "catmood2_trap" => (SchemeKind::Cat2Trap, true),
            "catmood2_tay" => (SchemeKind::Cat2Tay, true),
            _ => return None,
        };
        Some(SchemeSpec { kind, mood })
    }

    pub fn label(self) -> &'static str {
        match (self.kind, self.mood) {
            (SchemeKind::Cat2Trap, true) => "catmood2_trap",
            (SchemeKind::Cat2Tay, true) => "catmood2_tay",
            (kind, _) => kind.label(),
        }
    }
}
