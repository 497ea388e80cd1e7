use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An inclusive year interval with a label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub label: String,
    pub start: i32,
    pub end: i32,
}

impl Window {
    pub fn new(label: impl Into<String>, start: i32, end: i32) -> Self {
        Window {
            label: label.into(),
            start,
            end,
        }
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start..=self.end).contains(&year)
    }
}

/// Ordered, non-overlapping analysis windows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct WindowSpec {
    windows: Vec<Window>,
}

impl WindowSpec {
    pub fn new(windows: Vec<Window>) -> Result<Self> {
        if windows.is_empty() {
            return Err(Error::config("at least one window is required"));
        }
        for (i, w) in windows.iter().enumerate() {
            if w.label.is_empty() || w.label.contains(['/', '\\', ',', ':']) {
                return Err(Error::config(format!("invalid window label {:?}", w.label)));
            }
            if w.start > w.end {
                return Err(Error::config(format!("window {} starts after it ends", w.label)));
            }
            if windows[..i].iter().any(|o| o.label == w.label) {
                return Err(Error::config(format!("duplicate window label {}", w.label)));
            }
            if i > 0 && windows[i - 1].end >= w.start {
                return Err(Error::config(format!(
                    "window {} overlaps or precedes {}",
                    w.label,
                    windows[i - 1].label
                )));
            }
        }
        Ok(WindowSpec { windows })
    }

    /// Parses `P1:1974-1988,P2:1989-2003`.
    pub fn parse(text: &str) -> Result<Self> {
        let windows = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|item| {
                let bad = || Error::config(format!("invalid window {item:?}, expected LABEL:START-END"));
                let (label, range) = item.split_once(':').ok_or_else(bad)?;
                let (start, end) = range.split_once('-').ok_or_else(bad)?;
                Ok(Window::new(
                    label.trim(),
                    start.trim().parse().map_err(|_| bad())?,
                    end.trim().parse().map_err(|_| bad())?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(windows)
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    /// Index of the window containing `year`.
    pub fn index_of(&self, year: i32) -> Option<usize> {
        self.windows.iter().position(|w| w.contains(year))
    }

    /// First start year and last end year.
    pub fn span(&self) -> (i32, i32) {
        (self.windows[0].start, self.windows[self.windows.len() - 1].end)
    }
}

impl Default for WindowSpec {
    fn default() -> Self {
        WindowSpec {
            windows: vec![
                Window::new("P1", 1974, 1988),
                Window::new("P2", 1989, 2003),
                Window::new("P3", 2004, 2018),
            ],
        }
    }
}

impl<'de> Deserialize<'de> for WindowSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let windows = Vec::<Window>::deserialize(d)?;
        WindowSpec::new(windows).map_err(serde::de::Error::custom)
    }
}

/// Label of the window containing `year`, if any.
pub fn assign_window(year: i32, spec: &WindowSpec) -> Option<&str> {
    spec.index_of(year).map(|i| spec.windows[i].label.as_str())
}
