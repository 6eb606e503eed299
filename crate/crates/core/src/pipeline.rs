//! Decoder compositions: SSF, SSF+PAL, and the BP-predecoded variants.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cdec::{min_sum, BpStop, LlrVector, MinSumConfig, DEFAULT_BP_ITERS};
use crate::hgp::{quantum_syndrome, ErrorSupport, HgpCode, Syndrome};
use crate::pal::{min_line_cover, DecodeOutcome, LineCalibration, PalDecoder, PalError, DEFAULT_PAL_ITERS};
use crate::ssf::{ssf_decode, SsfOptions, SsfOutcome};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("decoder {0} needs a line calibration")]
    MissingCalibration(DecoderKind),
    #[error("unknown decoder {0:?} (expected ssf, ssf+pal, bp+ssf or bp+ssf+pal)")]
    UnknownDecoder(String),
    #[error("invalid decoder parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Pal(#[from] PalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecoderKind {
    #[serde(rename = "ssf")]
    Ssf,
    #[serde(rename = "ssf+pal")]
    SsfPal,
    #[serde(rename = "bp+ssf")]
    BpSsf,
    #[serde(rename = "bp+ssf+pal")]
    BpSsfPal,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 4] = [Self::Ssf, Self::SsfPal, Self::BpSsf, Self::BpSsfPal];

    pub fn uses_pal(self) -> bool {
        matches!(self, Self::SsfPal | Self::BpSsfPal)
    }

    pub fn uses_bp(self) -> bool {
        matches!(self, Self::BpSsf | Self::BpSsfPal)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ssf => "ssf",
            Self::SsfPal => "ssf+pal",
            Self::BpSsf => "bp+ssf",
            Self::BpSsfPal => "bp+ssf+pal",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecoderKind {
    type Err = PipelineError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| PipelineError::UnknownDecoder(s.to_string()))
    }
}

/// Which sign of the BP posterior puts a qubit into the BP estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum HardDecision {
    /// Flipped iff the posterior LLR is `≤ 0`, consistent with `λ > 0`
    /// meaning "probably unflipped".
    #[default]
    NonPositive,
    /// Flipped iff the posterior LLR is `> 0`.
    Positive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderSpec {
    pub kind: DecoderKind,
    /// BP rounds before SSF in the BP variants.
    pub bp_rounds: usize,
    pub pal_iters: usize,
    pub ssf: SsfOptions,
    pub hard_decision: HardDecision,
}

impl DecoderSpec {
    pub fn new(kind: DecoderKind) -> Self {
        Self {
            kind,
            bp_rounds: DEFAULT_BP_ITERS,
            pal_iters: DEFAULT_PAL_ITERS,
            ssf: SsfOptions { audit: false, ..SsfOptions::default() },
            hard_decision: HardDecision::default(),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.kind.uses_bp() && self.bp_rounds == 0 {
            return Err(PipelineError::InvalidParameter("BP rounds must be at least 1".into()));
        }
        if self.kind.uses_pal() && self.pal_iters == 0 {
            return Err(PipelineError::InvalidParameter("PAL iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BpSsfOutcome {
    /// BP estimate Δ SSF correction.
    pub correction: ErrorSupport,
    pub residual: Syndrome,
    pub bp_estimate: ErrorSupport,
    pub ssf: SsfOutcome,
}

/// `rounds` fixed iterations of min-sum over the X-check graph at prior `p`,
/// then SSF on the syndrome the BP estimate leaves unexplained.
pub fn bp_ssf_decode(
    code: &HgpCode,
    syndrome: &Syndrome,
    rounds: usize,
    p: f64,
    hard: HardDecision,
    ssf_options: &SsfOptions,
) -> BpSsfOutcome {
    let h = code.x_check_matrix();
    let mut sigma = vec![0u8; code.n_checks()];
    for x in syndrome.checks() {
        sigma[x] = 1;
    }
    let channel = LlrVector::uniform(code.n_qubits(), p).expect("p validated by caller").0;
    let cfg = MinSumConfig { max_iters: rounds, stop: BpStop::Fixed, ..MinSumConfig::default() };
    let bp = min_sum(h, &sigma, &channel, &cfg).expect("dimensions fixed by the code");
    let picked = bp.posterior.iter().enumerate().filter(|(_, &l)| match hard {
        HardDecision::NonPositive => l <= 0.0,
        HardDecision::Positive => l > 0.0,
    });
    let bp_estimate = ErrorSupport::from_qubits(code, picked.map(|(q, _)| q)).expect("in range");
    let mut remaining = syndrome.clone();
    remaining.xor_with(&quantum_syndrome(code, &bp_estimate));
    let ssf = ssf_decode(code, &remaining, ssf_options);
    BpSsfOutcome {
        correction: bp_estimate.symmetric_difference(&ssf.correction),
        residual: ssf.residual.clone(),
        bp_estimate,
        ssf,
    }
}

/// A decoder spec with its per-code state (line decoders) built once.
#[derive(Clone, Debug)]
pub struct Decoder {
    pub spec: DecoderSpec,
    /// Physical error rate used for the BP prior.
    pub p: f64,
    pal: Option<PalDecoder>,
}

impl Decoder {
    pub fn new(
        spec: DecoderSpec,
        code: &HgpCode,
        p: f64,
        calibration: Option<&LineCalibration>,
    ) -> Result<Self, PipelineError> {
        spec.validate()?;
        if spec.kind.uses_bp() && !(p > 0.0 && p < 1.0) {
            return Err(PipelineError::InvalidParameter(format!("BP prior needs p in (0, 1), got {p}")));
        }
        let pal = if spec.kind.uses_pal() {
            let cal = calibration.ok_or(PipelineError::MissingCalibration(spec.kind))?;
            Some(PalDecoder::new(code, cal)?.with_max_iters(spec.pal_iters))
        } else {
            None
        };
        Ok(Self { spec, p, pal })
    }

    pub fn decode(&self, code: &HgpCode, syndrome: &Syndrome) -> DecodeOutcome {
        let (stage_correction, stage_residual, ssf_trace, bp_iterations) = if self.spec.kind.uses_bp() {
            let out = bp_ssf_decode(code, syndrome, self.spec.bp_rounds, self.p, self.spec.hard_decision, &self.spec.ssf);
            (out.correction, out.residual, out.ssf.trace, Some(self.spec.bp_rounds))
        } else {
            let out = ssf_decode(code, syndrome, &self.spec.ssf);
            (out.correction, out.residual, out.trace, None)
        };
        let ssf_residual_weight = stage_residual.weight();
        let stopping_cover = (!stage_residual.is_zero()).then(|| min_line_cover(code, &stage_residual));
        let (correction, pal) = match &self.pal {
            Some(pal) => {
                let out = pal.decode(code, &stage_residual);
                (stage_correction.symmetric_difference(&out.correction), Some(out.trace))
            }
            None => (stage_correction, None),
        };
        let mut residual = syndrome.clone();
        residual.xor_with(&quantum_syndrome(code, &correction));
        DecodeOutcome {
            halted: !residual.is_zero(),
            correction,
            residual,
            ssf_residual_weight,
            stopping_cover,
            bp_iterations,
            ssf: ssf_trace,
            pal,
        }
    }
}

/// Builds the decoder for `spec` and runs it once.
pub fn run_decoder(
    spec: &DecoderSpec,
    code: &HgpCode,
    syndrome: &Syndrome,
    p: f64,
    calibration: Option<&LineCalibration>,
) -> Result<DecodeOutcome, PipelineError> {
    Ok(Decoder::new(*spec, code, p, calibration)?.decode(code, syndrome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgp::is_logical_failure;
    use crate::pal::decode_full;
    use crate::sim::{sample_error, trial_rng};
    use crate::tanner::peg_construct;

    fn code900() -> HgpCode {
        HgpCode::new(peg_construct(24, 18, 3, 4, 7).unwrap()).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for k in DecoderKind::ALL {
            assert_eq!(k.name().parse::<DecoderKind>().unwrap(), k);
        }
        assert!("bp".parse::<DecoderKind>().is_err());
    }

    #[test]
    fn pal_specs_need_calibration() {
        let c = code900();
        let err = run_decoder(&DecoderSpec::new(DecoderKind::SsfPal), &c, &Syndrome::zero(&c), 0.01, None);
        assert!(matches!(err, Err(PipelineError::MissingCalibration(DecoderKind::SsfPal))));
        let mut spec = DecoderSpec::new(DecoderKind::BpSsf);
        spec.bp_rounds = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn zero_syndrome_every_spec() {
        let c = code900();
        let cal = LineCalibration::fallback(7, 0.01);
        for k in DecoderKind::ALL {
            let out = run_decoder(&DecoderSpec::new(k), &c, &Syndrome::zero(&c), 0.01, Some(&cal)).unwrap();
            assert!(!out.halted);
            assert!(out.correction.is_empty(), "{k}");
        }
    }

    #[test]
    fn bp_ssf_corrects_single_qubit() {
        let c = code900();
        for q in [3, 450, 899] {
            let e = ErrorSupport::from_qubits(&c, [q]).unwrap();
            let s = quantum_syndrome(&c, &e);
            let out = bp_ssf_decode(&c, &s, 30, 0.01, HardDecision::NonPositive, &SsfOptions::default());
            assert!(out.residual.is_zero());
            assert!(!is_logical_failure(&c, &out.correction.symmetric_difference(&e)).unwrap());
        }
    }

    #[test]
    fn ssf_pal_spec_equals_decode_full() {
        let c = code900();
        let cal = LineCalibration::fallback(7, 0.03);
        let spec = DecoderSpec::new(DecoderKind::SsfPal);
        let dec = Decoder::new(spec, &c, 0.03, Some(&cal)).unwrap();
        let pal = PalDecoder::new(&c, &cal).unwrap();
        for i in 0..100 {
            let e = sample_error(&c, 0.03, &mut trial_rng(99, i));
            let s = quantum_syndrome(&c, &e);
            let a = dec.decode(&c, &s);
            let b = decode_full(&c, &s, &pal, &spec.ssf);
            assert!(a.same_result(&b));
            if !a.halted {
                assert_eq!(quantum_syndrome(&c, &a.correction), s);
            }
        }
    }
}
