use minui_a11y_core::lang::{Color, FontSpec, FontStyle};
use minui_a11y_core::render::{effective_font_size, ContentSizeCategory};
use minui_a11y_core::scanner::{
    contrast_ratio, dynamic_type_support, relative_luminance, ContrastVerdict, DynamicTypeSupport,
};
use proptest::prelude::*;

/// sRGB luminance written out directly from the WCAG 2 definition.
fn luminance(rgb: [u8; 3]) -> f64 {
    let lin = |v: u8| {
        let c = f64::from(v) / 255.0;
        if c <= 0.03928 {
            c / 12.92
        } else {
            ((c + 0.055) / 1.055).powf(2.4)
        }
    };
    0.2126 * lin(rgb[0]) + 0.7152 * lin(rgb[1]) + 0.0722 * lin(rgb[2])
}

fn ratio(a: [u8; 3], b: [u8; 3]) -> f64 {
    let (x, y) = (luminance(a), luminance(b));
    (x.max(y) + 0.05) / (x.min(y) + 0.05)
}

fn color(c: [u8; 3]) -> Color {
    Color::rgb(c[0], c[1], c[2])
}

#[test]
fn black_on_white_is_exactly_21() {
    assert_eq!(contrast_ratio(Color::BLACK, Color::WHITE, 17.0).ratio, 21.0);
    assert_eq!(contrast_ratio(Color::WHITE, Color::BLACK, 17.0).ratio, 21.0);
}

#[test]
fn grey_777777_on_white() {
    let grey = [0x77; 3];
    let l = relative_luminance(color(grey));
    assert!((l - luminance(grey)).abs() < 1e-12);
    assert!((l - 0.1845).abs() < 5e-5, "{l}");
    let got = contrast_ratio(color(grey), Color::WHITE, 17.0);
    assert!((got.ratio - ratio(grey, [255; 3])).abs() < 1e-6);
    assert_eq!(format!("{:.2}", got.ratio), "4.48");
    assert_eq!(got.verdict, ContrastVerdict::NearlyPassed);
    assert_eq!(contrast_ratio(color(grey), Color::WHITE, 18.0).verdict, ContrastVerdict::Pass);
}

#[test]
fn every_grey_level_matches() {
    for v in 0..=255u8 {
        let g = [v; 3];
        assert!((relative_luminance(color(g)) - luminance(g)).abs() < 1e-12, "{v}");
    }
}

const MULTIPLIERS: [f64; 7] = [0.82, 0.88, 0.94, 1.00, 1.12, 1.24, 1.35];

fn base(style: FontStyle) -> f64 {
    match style {
        FontStyle::Caption => 12.0,
        FontStyle::Body => 17.0,
        FontStyle::Headline => 20.0,
    }
}

fn style() -> impl Strategy<Value = FontStyle> {
    prop_oneof![Just(FontStyle::Caption), Just(FontStyle::Body), Just(FontStyle::Headline)]
}

fn font() -> impl Strategy<Value = FontSpec> {
    prop_oneof![
        (1.0f64..60.0).prop_map(|size| FontSpec::Fixed { size }),
        style().prop_map(|style| FontSpec::Dynamic { style }),
        (style(), 5.0f64..40.0).prop_map(|(style, max)| FontSpec::Capped { style, max }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 512, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn contrast_matches_formula(a in any::<[u8; 3]>(), b in any::<[u8; 3]>(), pt in 8.0f64..40.0) {
        let got = contrast_ratio(color(a), color(b), pt);
        let want = ratio(a, b);
        prop_assert!((got.ratio - want).abs() < 1e-9);
        prop_assert!((1.0..=21.0).contains(&got.ratio));
        let threshold = if pt >= 18.0 { 3.0 } else { 4.5 };
        let verdict = if want >= threshold {
            ContrastVerdict::Pass
        } else if want >= threshold - 1.0 {
            ContrastVerdict::NearlyPassed
        } else {
            ContrastVerdict::Failed
        };
        // Skip values within rounding of a band edge.
        if (want - threshold).abs() > 1e-9 && (want - threshold + 1.0).abs() > 1e-9 {
            prop_assert_eq!(got.verdict, verdict);
        }
    }

    #[test]
    fn type_sweep_matches_table(f in font()) {
        let sizes: Vec<f64> = MULTIPLIERS
            .iter()
            .map(|m| match f {
                FontSpec::Fixed { size } => size,
                FontSpec::Dynamic { style } => base(style) * m,
                FontSpec::Capped { style, max } => (base(style) * m).min(max),
            })
            .collect();
        for (c, want) in ContentSizeCategory::ALL.iter().zip(&sizes) {
            prop_assert!((effective_font_size(&f, *c) - want).abs() < 1e-12);
        }
        prop_assert!(sizes.windows(2).all(|w| w[1] >= w[0]));
        let steps = sizes.windows(2).filter(|w| w[1] > w[0]).count();
        let want = match steps {
            0 => DynamicTypeSupport::None,
            6 => DynamicTypeSupport::Full,
            _ => DynamicTypeSupport::Partial,
        };
        prop_assert_eq!(dynamic_type_support(&f), want);
    }
}

#[test]
fn sweep_examples() {
    assert_eq!(dynamic_type_support(&FontSpec::Fixed { size: 20.0 }), DynamicTypeSupport::None);
    assert_eq!(dynamic_type_support(&FontSpec::Dynamic { style: FontStyle::Body }), DynamicTypeSupport::Full);
    assert_eq!(
        dynamic_type_support(&FontSpec::Capped { style: FontStyle::Body, max: 19.0 }),
        DynamicTypeSupport::Partial
    );
    assert_eq!(effective_font_size(&FontSpec::Dynamic { style: FontStyle::Body }, ContentSizeCategory::L), 17.0);
}
