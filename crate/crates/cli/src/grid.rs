//! Comparison-grid composition: one labeled panel per preset, side by
//! side at identical scale.

use la3d_core::Frame;

use crate::font;

/// Blank columns between panels.
pub const GUTTER: u32 = 4;
/// Height of the label strip above the panels.
pub const LABEL_STRIP_H: u32 = font::GLYPH_H + 4;

/// Total grid width for `panels` frames of width `frame_w`.
pub fn grid_width(panels: u32, frame_w: u32) -> u32 {
    panels * frame_w + (panels - 1) * GUTTER
}

/// Composes labeled panels left to right. All panels must share the
/// input frame's dimensions; labels are clipped to their panel width.
pub fn compose_grid(panels: &[(String, Frame)]) -> Frame {
    assert!(!panels.is_empty());
    let (fw, fh) = (panels[0].1.width(), panels[0].1.height());
    let w = grid_width(panels.len() as u32, fw);
    let h = LABEL_STRIP_H + fh;
    let mut buf = vec![255u8; w as usize * h as usize * 3];

    for (idx, (label, frame)) in panels.iter().enumerate() {
        assert!(frame.width() == fw && frame.height() == fh, "panel size mismatch");
        let x0 = idx as u32 * (fw + GUTTER);
        // center the label over the panel, clip to its width
        let shown: String = label
            .chars()
            .take((fw / font::ADVANCE) as usize)
            .collect();
        let lx = x0 + (fw.saturating_sub(font::text_width(&shown))) / 2;
        font::draw_text(&mut buf, w, h, lx, 2, &shown, [0, 0, 0]);
        for y in 0..fh {
            for x in 0..fw {
                let i = ((y + LABEL_STRIP_H) as usize * w as usize + (x0 + x) as usize) * 3;
                buf[i..i + 3].copy_from_slice(&frame.pixel(x, y));
            }
        }
    }
    Frame::from_rgb(w, h, buf).expect("grid dimensions are valid")
}
