//! Periodic table lookup and default valence rules.

/// Element symbols indexed by atomic number. Index 0 is the `*` wildcard.
const SYMBOLS: [&str; 119] = [
    "*", "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S",
    "Cl", "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge",
    "As", "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd",
    "In", "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd",
    "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm",
    "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn",
    "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
];

/// Atomic number, with 0 reserved for the `*` wildcard atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Element(u8);

impl Element {
    pub const WILDCARD: Element = Element(0);
    pub const HYDROGEN: Element = Element(1);
    pub const BORON: Element = Element(5);
    pub const CARBON: Element = Element(6);
    pub const NITROGEN: Element = Element(7);
    pub const OXYGEN: Element = Element(8);
    pub const FLUORINE: Element = Element(9);
    pub const PHOSPHORUS: Element = Element(15);
    pub const SULFUR: Element = Element(16);
    pub const CHLORINE: Element = Element(17);
    pub const BROMINE: Element = Element(35);
    pub const IODINE: Element = Element(53);

    pub fn from_atomic_number(z: u8) -> Option<Element> {
        ((z as usize) < SYMBOLS.len()).then_some(Element(z))
    }

    /// Looks up a capitalised symbol such as `"Cl"` or `"Na"`.
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        SYMBOLS
            .iter()
            .position(|s| *s == symbol)
            .map(|z| Element(z as u8))
    }

    pub fn atomic_number(self) -> u8 {
        self.0
    }

    pub fn symbol(self) -> &'static str {
        SYMBOLS[self.0 as usize]
    }

    /// Member of the bare-atom organic subset (`B C N O P S F Cl Br I`).
    pub fn is_organic_subset(self) -> bool {
        matches!(self.0, 5 | 6 | 7 | 8 | 9 | 15 | 16 | 17 | 35 | 53)
    }

    /// Elements that may be written in lowercase aromatic form.
    pub fn can_be_aromatic(self) -> bool {
        matches!(self.0, 5 | 6 | 7 | 8 | 15 | 16 | 33 | 34)
    }

    pub fn is_halogen(self) -> bool {
        matches!(self.0, 9 | 17 | 35 | 53 | 85)
    }

    /// Period (row) and main-group number (1..=18) for main-group elements.
    fn period_and_group(self) -> Option<(u8, u8)> {
        let z = self.0;
        let (period, first) = match z {
            1 => return Some((1, 1)),
            2 => return Some((1, 18)),
            3..=10 => (2, 3),
            11..=18 => (3, 11),
            19..=36 => (4, 19),
            37..=54 => (5, 37),
            55..=86 => (6, 55),
            _ => return None,
        };
        let offset = z - first;
        let group = match period {
            2 | 3 => {
                if offset < 2 {
                    offset + 1
                } else {
                    offset + 11
                }
            }
            4 | 5 => {
                if offset < 2 {
                    offset + 1
                } else if offset < 12 {
                    // transition metals
                    return None;
                } else {
                    offset + 1
                }
            }
            _ => {
                // period 6: Cs Ba, then lanthanides + transition metals, Tl..Rn
                match z {
                    55 => 1,
                    56 => 2,
                    81..=86 => z - 81 + 13,
                    _ => return None,
                }
            }
        };
        Some((period, group))
    }

    /// Allowed valences for this element carrying `charge`, smallest first.
    ///
    /// A charged atom takes the valence of its isoelectronic neighbour in the
    /// same period (N+ behaves like C, O- like F). `None` means the valence is
    /// not checked.
    pub fn allowed_valences(self, charge: i8) -> Option<&'static [u8]> {
        if self == Element::HYDROGEN {
            return Some(if charge == 0 { &[1] } else { &[0] });
        }
        let (period, group) = self.period_and_group()?;
        if period < 2 {
            return None;
        }
        let effective = group as i16 - charge as i16;
        let table: &'static [u8] = match (effective, period) {
            (13, _) => &[3],
            (14, _) => &[4],
            (15, 2) => &[3],
            (15, _) => &[3, 5],
            (16, 2) => &[2],
            (16, _) => &[2, 4, 6],
            (17, _) => &[1],
            (18, _) => &[0],
            _ => return None,
        };
        Some(table)
    }

    /// Main-group number after the isoelectronic charge shift.
    pub(crate) fn effective_group(self, charge: i8) -> Option<i16> {
        let (_, group) = self.period_and_group()?;
        Some(group as i16 - charge as i16)
    }
}

impl std::fmt::Display for Element {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.symbol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_roundtrip() {
        for z in 0..=118u8 {
            let e = Element::from_atomic_number(z).unwrap();
            assert_eq!(Element::from_symbol(e.symbol()), Some(e));
        }
        assert_eq!(Element::from_symbol("Xx"), None);
    }

    #[test]
    fn groups() {
        assert_eq!(Element::CARBON.period_and_group(), Some((2, 14)));
        assert_eq!(Element::SULFUR.period_and_group(), Some((3, 16)));
        assert_eq!(Element::BROMINE.period_and_group(), Some((4, 17)));
        assert_eq!(Element::IODINE.period_and_group(), Some((5, 17)));
        assert_eq!(Element::from_symbol("Se").unwrap().period_and_group(), Some((4, 16)));
        assert_eq!(Element::from_symbol("Fe").unwrap().period_and_group(), None);
        assert_eq!(Element::from_symbol("Bi").unwrap().period_and_group(), Some((6, 15)));
    }

    #[test]
    fn valence_table() {
        assert_eq!(Element::BORON.allowed_valences(0), Some(&[3u8][..]));
        assert_eq!(Element::CARBON.allowed_valences(0), Some(&[4u8][..]));
        assert_eq!(Element::NITROGEN.allowed_valences(0), Some(&[3u8][..]));
        assert_eq!(Element::OXYGEN.allowed_valences(0), Some(&[2u8][..]));
        assert_eq!(Element::PHOSPHORUS.allowed_valences(0), Some(&[3u8, 5][..]));
        assert_eq!(Element::SULFUR.allowed_valences(0), Some(&[2u8, 4, 6][..]));
        assert_eq!(Element::CHLORINE.allowed_valences(0), Some(&[1u8][..]));
        // charge shifts
        assert_eq!(Element::NITROGEN.allowed_valences(1), Some(&[4u8][..]));
        assert_eq!(Element::OXYGEN.allowed_valences(-1), Some(&[1u8][..]));
        assert_eq!(Element::CARBON.allowed_valences(-1), Some(&[3u8][..]));
        assert_eq!(Element::CARBON.allowed_valences(1), Some(&[3u8][..]));
        assert_eq!(Element::BORON.allowed_valences(-1), Some(&[4u8][..]));
        assert_eq!(Element::from_symbol("Fe").unwrap().allowed_valences(0), None);
    }
}
