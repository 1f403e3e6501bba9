//! Hook points of the interpreter. The reference semantics is the all-`None`
//! value; each field is one slot and holds at most one alternative behaviour.

pub use super::value::RelSwap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchSelect {
    /// Every arm runs, else included, regardless of conditions.
    RunAll,
    /// Exactly one arm runs, conditions ignored. 0 picks the else arm, or
    /// the first branch when there is no else; k >= 1 picks branch k-1,
    /// clamped to the last branch.
    ForceArm(usize),
    /// Every branch whose condition holds runs; else runs iff none did.
    AllTrue,
    /// Branches are tried in order until one fails; else never runs.
    ExitAtFirstFalse,
    /// Every condition is read as its negation.
    Negate,
    /// Standard chain, followed by the else arm unconditionally.
    ElseAlways,
    /// Conditions are tested in a permuted order: 0 reverses, r > 0 rotates
    /// left by r.
    Permuted(usize),
    /// After a branch runs its condition is tested again; if it no longer
    /// holds the else arm runs as well.
    RecheckForElse,
    /// Inside a loop body the first branch always runs and else never does.
    IgnoreInLoop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelPost {
    /// No arm ran and there is no else: the program restarts from the top.
    Restart,
    /// No arm ran and there is no else: the program halts.
    Halt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelRepeat {
    /// The whole statement re-executes while a conditional branch ran.
    WhileTaken,
    Times(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelTrigger {
    /// A false first condition arms a watcher that runs the branch once as
    /// soon as the condition holds after any later statement.
    AfterStatement,
    /// Watchers for every `if` are armed at program start.
    WholeProgram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelCondEval {
    /// The body runs first; it is rolled back if the condition then fails.
    Hindsight,
    /// False condition: statements run in shadow until it holds, then the
    /// rest of the body runs for real.
    ShadowToEnd,
    /// As `ShadowToEnd`, but the rest of the body stops once it fails again.
    ShadowWhileTrue,
    /// As `ShadowToEnd`, but the shadow work is discarded and the whole body
    /// runs from its first statement.
    ShadowThenWhole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryOrder {
    BodyFirst,
    /// Initialization is postponed to the first update phase after a body.
    DeferredInit,
    UpdateFirst,
    /// Header once, body at most once.
    LoopIsIf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleOrder {
    UpdateBeforeBody,
    /// `UpdateBeforeBody`, only for loops whose updates are all prefix
    /// increments or decrements.
    UpdateBeforeBodyIfPrefix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseSkip {
    Init,
    Cond,
    Body,
    Update,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondSemantics {
    /// The condition is re-tested after every top-level body statement.
    RecheckInBody,
    /// After the first false test, this many extra iterations run untested.
    Extra(u32),
    /// Until-loop if the first test is false, otherwise standard.
    UntilIfFirstFalse,
    Until,
    /// A false first test iterates until the condition holds, then standard.
    WaitThenIterate,
    /// As `WaitThenIterate`, but waiting iterations skip the body.
    WaitSkippingBody,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BodySchedule {
    /// The trip count counts statements, not iterations.
    CountsStatements,
    /// Each body statement runs for every control value before the next.
    Grouped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateSemantics {
    Alternating,
    UnitStep,
    DoubleIncDec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateView {
    /// Header reads of the control variable see a copy refreshed only by
    /// the header itself.
    ShadowControlInHeader,
    /// Body reads of the control variable see its initial value.
    FrozenControlInBody,
    /// Body reads of loop-carried variables see their values at loop entry.
    FrozenCarriedInBody,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopPost {
    /// A loop that ends by its condition ends the program.
    Halt,
    /// A false condition runs the following statement, then re-tests.
    IterateFollowing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Nesting {
    /// A loop containing another loop runs its body at most once.
    OuterOnce,
    /// An inner loop that never enters skips the rest of the outer body.
    SkipRestOnEmptyInner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpAs {
    Continue,
    Halt,
    Ignore,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Hooks {
    pub branch_select: Option<BranchSelect>,
    pub sel_post: Option<SelPost>,
    pub sel_repeat: Option<SelRepeat>,
    pub sel_trigger: Option<SelTrigger>,
    pub sel_cond_eval: Option<SelCondEval>,
    pub entry: Option<EntryOrder>,
    pub cycle: Option<CycleOrder>,
    pub phase_skip: Option<PhaseSkip>,
    pub cond_semantics: Option<CondSemantics>,
    pub rel_swap: Option<RelSwap>,
    pub body_schedule: Option<BodySchedule>,
    pub update_semantics: Option<UpdateSemantics>,
    pub state_view: Option<StateView>,
    pub loop_post: Option<LoopPost>,
    pub nesting: Option<Nesting>,
    pub on_break: Option<JumpAs>,
    pub on_continue: Option<JumpAs>,
}

impl Hooks {
    pub fn is_reference(&self) -> bool {
        *self == Hooks::default()
    }
}
