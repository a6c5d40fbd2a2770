//! The named anonymization method registry.

use crate::adaptive::{AdaptiveParams, BlurBase, Method, PixelizeBase};
use crate::error::{Error, Result};
use crate::filters::CannyParams;

/// A fully-resolved anonymization method plus the name it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct AnonymizerSpec {
    pub preset_name: String,
    pub method: Method,
}

/// The built-in preset identifiers.
pub const PRESET_NAMES: [&str; 13] = [
    "RAW_IMAGE",
    "BLACKENED",
    "BLACKENED_EDGED",
    "BLURRED",
    "PIXELIZED_D2",
    "PIXELIZED_D4",
    "PIXELIZED_D8",
    "BLURRED_A",
    "PIXELIZED_D2_A",
    "PIXELIZED_D4_A",
    "PIXELIZED_D8_A",
    "BLURRED_A_MAX",
    "PIXELIZED_A_MAX",
];

fn blur_base() -> BlurBase {
    BlurBase::new(13, 13, 10.0).expect("builtin blur base is valid")
}

fn adaptive_defaults() -> AdaptiveParams {
    AdaptiveParams::default() // alpha_r = 1.0, alpha_b = 0.5
}

/// Resolves a preset name to its method.
pub fn resolve_preset(name: &str) -> Result<AnonymizerSpec> {
    let method = match name {
        "RAW_IMAGE" => Method::Raw,
        "BLACKENED" => Method::Blackened,
        "BLACKENED_EDGED" => Method::BlackenedEdged(CannyParams::new(100.0, 200.0)?),
        "BLURRED" => Method::Blurred(blur_base()),
        "PIXELIZED_D2" => Method::Pixelized(PixelizeBase::new(2)?),
        "PIXELIZED_D4" => Method::Pixelized(PixelizeBase::new(4)?),
        "PIXELIZED_D8" => Method::Pixelized(PixelizeBase::new(8)?),
        "BLURRED_A" => Method::BlurredAdaptive(blur_base(), adaptive_defaults()),
        "PIXELIZED_D2_A" => Method::PixelizedAdaptive(PixelizeBase::new(2)?, adaptive_defaults()),
        "PIXELIZED_D4_A" => Method::PixelizedAdaptive(PixelizeBase::new(4)?, adaptive_defaults()),
        "PIXELIZED_D8_A" => Method::PixelizedAdaptive(PixelizeBase::new(8)?, adaptive_defaults()),
        "BLURRED_A_MAX" => Method::BlurredAdaptive(
            blur_base(),
            AdaptiveParams {
                ismax: true,
                ..adaptive_defaults()
            },
        ),
        "PIXELIZED_A_MAX" => Method::PixelizedAdaptive(
            PixelizeBase::new(4)?,
            AdaptiveParams {
                ismax: true,
                ..adaptive_defaults()
            },
        ),
        _ => {
            return Err(Error::UnknownPreset {
                name: name.to_string(),
                available: PRESET_NAMES.join(", "),
            })
        }
    };
    Ok(AnonymizerSpec {
        preset_name: name.to_string(),
        method,
    })
}

/// Optional knob overrides applied on top of a preset's adaptive settings.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AdaptiveOverrides {
    pub alpha_r: Option<f64>,
    pub alpha_b: Option<f64>,
    pub ismax: Option<bool>,
    pub isfullblur: Option<bool>,
    pub z_ref: Option<(u32, u32)>,
}

impl AnonymizerSpec {
    /// Applies overrides to adaptive methods; non-adaptive methods are
    /// unaffected. Overridden parameters are re-validated.
    pub fn with_adaptive_overrides(mut self, ov: &AdaptiveOverrides) -> Result<Self> {
        let apply = |params: &mut AdaptiveParams| -> Result<()> {
            if let Some(v) = ov.alpha_r {
                params.alpha_r = v;
            }
            if let Some(v) = ov.alpha_b {
                params.alpha_b = v;
            }
            if let Some(v) = ov.ismax {
                params.ismax = v;
            }
            if let Some(v) = ov.isfullblur {
                params.isfullblur = v;
            }
            if let Some(v) = ov.z_ref {
                params.z_ref = Some(v);
            }
            params.validate()
        };
        match &mut self.method {
            Method::BlurredAdaptive(_, p) | Method::PixelizedAdaptive(_, p) => apply(p)?,
            _ => {}
        }
        Ok(self)
    }
}
