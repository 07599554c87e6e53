// SPDX-License-Identifier: Apache-2.0

//! Fixed float formatting shared by every CSV writer.

/// Scientific notation with 12 significant digits.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

#[cfg(test)]
mod tests {
    use super::fmt12;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt12(1.0), "1.00000000000e0");
        assert_eq!(fmt12(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(fmt12(6.02214076e23), "6.02214076000e23");
    }
}
