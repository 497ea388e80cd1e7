use std::fmt;

/// Index into [`FIELDS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldId(pub u8);

impl FieldId {
    pub fn name(self) -> &'static str {
        FIELDS[self.0 as usize].0
    }

    pub fn sector(self) -> &'static str {
        FIELDS[self.0 as usize].1
    }

    pub fn from_name(name: &str) -> Option<FieldId> {
        FIELDS.iter().position(|(n, _)| *n == name).map(|i| FieldId(i as u8))
    }

    pub fn all() -> impl Iterator<Item = FieldId> {
        (0..FIELD_COUNT as u8).map(FieldId)
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const FIELD_COUNT: usize = 35;

/// The 35 technology fields with their sector, in classification order.
pub const FIELDS: [(&str, &str); FIELD_COUNT] = [
    ("Electrical machinery, apparatus, energy", "Electrical engineering"),
    ("Audio-visual technology", "Electrical engineering"),
    ("Telecommunications", "Electrical engineering"),
    ("Digital communication", "Electrical engineering"),
    ("Basic communication processes", "Electrical engineering"),
    ("Computer technology", "Electrical engineering"),
    ("IT methods for management", "Electrical engineering"),
    ("Semiconductors", "Electrical engineering"),
    ("Optics", "Instruments"),
    ("Measurement", "Instruments"),
    ("Analysis of biological materials", "Instruments"),
    ("Control", "Instruments"),
    ("Medical technology", "Instruments"),
    ("Organic fine chemistry", "Chemistry"),
    ("Biotechnology", "Chemistry"),
    ("Pharmaceuticals", "Chemistry"),
    ("Macromolecular chemistry, polymers", "Chemistry"),
    ("Food chemistry", "Chemistry"),
    ("Basic materials chemistry", "Chemistry"),
    ("Materials, metallurgy", "Chemistry"),
    ("Surface technology, coating", "Chemistry"),
    ("Micro-structural and nano-technology", "Chemistry"),
    ("Chemical engineering", "Chemistry"),
    ("Environmental technology", "Chemistry"),
    ("Handling", "Mechanical engineering"),
    ("Machine tools", "Mechanical engineering"),
    ("Engines, pumps, turbines", "Mechanical engineering"),
    ("Textile and paper machines", "Mechanical engineering"),
    ("Other special machines", "Mechanical engineering"),
    ("Thermal processes and apparatus", "Mechanical engineering"),
    ("Mechanical elements", "Mechanical engineering"),
    ("Transport", "Mechanical engineering"),
    ("Furniture, games", "Other fields"),
    ("Other consumer goods", "Other fields"),
    ("Civil engineering", "Other fields"),
];

/// Field names in classification order.
pub fn field_names() -> Vec<String> {
    FIELDS.iter().map(|(n, _)| n.to_string()).collect()
}
