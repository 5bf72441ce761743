//! C ABI for `coopeq`.
//!
//! Games live behind an opaque [`CoopeqGame`] handle created by one of the
//! `coopeq_game_*` constructors and released with [`coopeq_game_free`].
//! Every fallible call returns a [`CoopeqStatus`] and writes its result
//! through an out pointer; on failure the out pointer is left untouched and
//! [`coopeq_last_error_message`] describes what went wrong.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use coopeq::coopeq::{v_npd, v_pgg};
use coopeq::empirics::{rank_sum, PValueMethod};
use coopeq::preferences::{cr_utility, fs_utility, PreferenceParams};
use coopeq::{CoalitionStructure, Error, ForecastReport, GameSpec, SymmetricAction};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoopeqStatus {
    Ok = 0,
    NullPointer = 1,
    ParameterOutOfRange = 2,
    Unsupported = 3,
    InvalidInput = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoopeqStructure {
    Selfish = 0,
    FullyCooperative = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoopeqForecast {
    pub structure: CoopeqStructure,
    pub reference_action: f64,
    pub incentive: f64,
    pub disincentive: f64,
    pub tau_pair: f64,
    pub tau_nobody: f64,
    pub e_nobody: f64,
    pub e_deviation: f64,
    pub forecast: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoopeqPrediction {
    pub winning_structure: CoopeqStructure,
    /// Contribution fraction, cooperation probability or price.
    pub equilibrium: f64,
    pub equilibrium_payoff: f64,
    pub selfish: CoopeqForecast,
    pub cooperative: CoopeqForecast,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoopeqRankSum {
    pub u: f64,
    pub u_other: f64,
    pub p_value: f64,
    /// True when the p-value comes from exact enumeration.
    pub exact: bool,
}

/// Opaque game handle.
pub struct CoopeqGame {
    spec: GameSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> CoopeqStatus {
    match err {
        Error::ParameterOutOfRange(_)
        | Error::ActionOutOfRange { .. }
        | Error::TooManyPlayers { .. }
        | Error::DegenerateSweep(_) => CoopeqStatus::ParameterOutOfRange,
        Error::Unsupported(_) => CoopeqStatus::Unsupported,
        _ => CoopeqStatus::InvalidInput,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F>(f: F) -> CoopeqStatus
where
    F: FnOnce() -> Result<(), CoopeqStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            CoopeqStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("panic inside coopeq");
            CoopeqStatus::Panic
        }
    }
}

fn fail(err: Error) -> CoopeqStatus {
    set_last_error(&err.to_string());
    status_of(&err)
}

fn null(what: &str) -> CoopeqStatus {
    set_last_error(&format!("{what} is null"));
    CoopeqStatus::NullPointer
}

unsafe fn game_ref<'a>(game: *const CoopeqGame) -> Result<&'a CoopeqGame, CoopeqStatus> {
    game.as_ref().ok_or_else(|| null("game"))
}

unsafe fn slice_arg<'a>(data: *const f64, len: usize, what: &str) -> Result<&'a [f64], CoopeqStatus> {
    if len == 0 {
        Ok(&[])
    } else if data.is_null() {
        Err(null(what))
    } else {
        Ok(slice::from_raw_parts(data, len))
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), CoopeqStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(value);
    Ok(())
}

fn structure_to_c(s: CoalitionStructure) -> CoopeqStructure {
    match s {
        CoalitionStructure::Selfish => CoopeqStructure::Selfish,
        CoalitionStructure::FullyCooperative => CoopeqStructure::FullyCooperative,
    }
}

fn forecast_to_c(r: &ForecastReport) -> CoopeqForecast {
    CoopeqForecast {
        structure: structure_to_c(r.structure),
        reference_action: r.reference_action,
        incentive: r.incentive,
        disincentive: r.disincentive,
        tau_pair: r.tau_pair,
        tau_nobody: r.tau_nobody,
        e_nobody: r.e_nobody,
        e_deviation: r.e_deviation,
        forecast: r.forecast,
    }
}

unsafe fn make_game(spec: GameSpec, out: *mut *mut CoopeqGame) -> CoopeqStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = spec.validate().map_err(fail)?;
        out.write(Box::into_raw(Box::new(CoopeqGame { spec })));
        Ok(())
    })
}

/// Creates a linear public goods game with marginal return `gamma`.
///
/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_game_pgg(
    n: usize,
    gamma: f64,
    endowment: f64,
    out: *mut *mut CoopeqGame,
) -> CoopeqStatus {
    make_game(GameSpec::Pgg { n, gamma, endowment }, out)
}

/// Creates an N-person prisoner's dilemma with benefit `b` and cost `c`.
///
/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_game_npd(n: usize, b: f64, c: f64, out: *mut *mut CoopeqGame) -> CoopeqStatus {
    make_game(GameSpec::npd(n, b, c), out)
}

/// Creates a Bertrand competition with prices in `[low, high]`.
///
/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_game_bertrand(
    n: usize,
    low: f64,
    high: f64,
    out: *mut *mut CoopeqGame,
) -> CoopeqStatus {
    make_game(GameSpec::bertrand(n, low, high), out)
}

/// Creates a public goods game whose total benefit is `b_n`.
///
/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_game_general_pgg(n: usize, b_n: f64, out: *mut *mut CoopeqGame) -> CoopeqStatus {
    make_game(GameSpec::general_pgg(n, b_n), out)
}

/// Releases a game. Null is ignored.
///
/// # Safety
/// `game` must be null or a handle from a `coopeq_game_*` constructor that
/// has not been freed.
#[no_mangle]
pub unsafe extern "C" fn coopeq_game_free(game: *mut CoopeqGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// # Safety
/// `game` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_game_players(game: *const CoopeqGame, out: *mut usize) -> CoopeqStatus {
    guard(|| {
        let g = game_ref(game)?;
        write_out(out, g.spec.n())
    })
}

/// Payoffs of every player for a full action profile of length N.
///
/// # Safety
/// `profile` and `out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn coopeq_payoffs(
    game: *const CoopeqGame,
    profile: *const f64,
    len: usize,
    out: *mut f64,
) -> CoopeqStatus {
    guard(|| {
        let g = game_ref(game)?;
        let profile = slice_arg(profile, len, "profile")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let payoffs = g.spec.payoffs(profile).map_err(fail)?;
        ptr::copy_nonoverlapping(payoffs.as_ptr(), out, payoffs.len());
        Ok(())
    })
}

/// Cooperative equilibrium of a game.
///
/// # Safety
/// `game` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_solve(game: *const CoopeqGame, out: *mut CoopeqPrediction) -> CoopeqStatus {
    guard(|| {
        let g = game_ref(game)?;
        let p = coopeq::solve(&g.spec).map_err(fail)?;
        write_out(
            out,
            CoopeqPrediction {
                winning_structure: structure_to_c(p.winning_structure),
                equilibrium: p.equilibrium.value(),
                equilibrium_payoff: p.equilibrium_payoff,
                selfish: forecast_to_c(&p.selfish),
                cooperative: forecast_to_c(&p.cooperative),
            },
        )
    })
}

/// Forecast associated with one coalition structure.
///
/// # Safety
/// `game` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_forecast(
    game: *const CoopeqGame,
    structure: CoopeqStructure,
    out: *mut CoopeqForecast,
) -> CoopeqStatus {
    guard(|| {
        let g = game_ref(game)?;
        let structure = match structure {
            CoopeqStructure::Selfish => CoalitionStructure::Selfish,
            CoopeqStructure::FullyCooperative => CoalitionStructure::FullyCooperative,
        };
        let r = coopeq::forecast(&g.spec, structure).map_err(fail)?;
        write_out(out, forecast_to_c(&r))
    })
}

/// Expected payoff when every player independently uses `action`.
///
/// # Safety
/// `game` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_expected_symmetric_payoff(
    game: *const CoopeqGame,
    action: f64,
    out: *mut f64,
) -> CoopeqStatus {
    guard(|| {
        let g = game_ref(game)?;
        let a = SymmetricAction::new(&g.spec, action).map_err(fail)?;
        write_out(out, g.spec.expected_symmetric_payoff(a))
    })
}

/// Cooperative forecast of the public goods game, per unit of endowment.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_v_pgg(gamma: f64, n: usize, out: *mut f64) -> CoopeqStatus {
    guard(|| write_out(out, v_pgg(gamma, n).map_err(fail)?))
}

/// Cooperative forecast of the prisoner's dilemma.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_v_npd(b: f64, c: f64, n: usize, out: *mut f64) -> CoopeqStatus {
    guard(|| write_out(out, v_npd(b, c, n).map_err(fail)?))
}

/// Fehr-Schmidt utility of player `focal`.
///
/// # Safety
/// `payoffs` must hold `len` doubles; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_fs_utility(
    alpha: f64,
    beta: f64,
    payoffs: *const f64,
    len: usize,
    focal: usize,
    out: *mut f64,
) -> CoopeqStatus {
    guard(|| {
        let p = slice_arg(payoffs, len, "payoffs")?;
        write_out(out, fs_utility(alpha, beta, p, focal).map_err(fail)?)
    })
}

/// Charness-Rabin utility of player `focal`. A NaN `delta` selects the
/// one-parameter form.
///
/// # Safety
/// `payoffs` must hold `len` doubles; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_cr_utility(
    alpha: f64,
    delta: f64,
    payoffs: *const f64,
    len: usize,
    focal: usize,
    out: *mut f64,
) -> CoopeqStatus {
    guard(|| {
        let p = slice_arg(payoffs, len, "payoffs")?;
        let params = if delta.is_nan() {
            PreferenceParams::CharnessRabin { alpha }
        } else {
            PreferenceParams::CharnessRabin2 { alpha, delta }
        };
        let params = params.validate().map_err(fail)?;
        write_out(out, cr_utility(&params, p, focal).map_err(fail)?)
    })
}

/// Two-sided Mann-Whitney rank-sum test.
///
/// # Safety
/// `a` must hold `a_len` doubles, `b` must hold `b_len` doubles and `out`
/// must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn coopeq_rank_sum(
    a: *const f64,
    a_len: usize,
    b: *const f64,
    b_len: usize,
    out: *mut CoopeqRankSum,
) -> CoopeqStatus {
    guard(|| {
        let a = slice_arg(a, a_len, "a")?;
        let b = slice_arg(b, b_len, "b")?;
        let r = rank_sum(a, b).map_err(fail)?;
        write_out(
            out,
            CoopeqRankSum {
                u: r.u,
                u_other: r.u_other,
                p_value: r.p_value,
                exact: r.method == PValueMethod::Exact,
            },
        )
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn coopeq_status_message(status: CoopeqStatus) -> *const c_char {
    let s: &'static CStr = match status {
        CoopeqStatus::Ok => c"ok",
        CoopeqStatus::NullPointer => c"null pointer argument",
        CoopeqStatus::ParameterOutOfRange => c"parameter out of range",
        CoopeqStatus::Unsupported => c"unsupported operation",
        CoopeqStatus::InvalidInput => c"invalid input",
        CoopeqStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message for the most recent failure on this thread, or "" after a
/// success. Valid until the next coopeq call on the same thread.
#[no_mangle]
pub extern "C" fn coopeq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
