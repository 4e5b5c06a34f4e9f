use std::collections::BTreeMap;

use crate::error::{check_shape, Error, Result};

/// The four layout classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum LayoutClass {
    Ceiling = 0,
    Wall = 1,
    Floor = 2,
    NotLayout = 3,
}

impl LayoutClass {
    pub const ALL: [LayoutClass; 4] = [
        LayoutClass::Ceiling,
        LayoutClass::Wall,
        LayoutClass::Floor,
        LayoutClass::NotLayout,
    ];

    #[inline]
    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            LayoutClass::Ceiling => "ceiling",
            LayoutClass::Wall => "wall",
            LayoutClass::Floor => "floor",
            LayoutClass::NotLayout => "not_layout",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

/// Per-pixel layout classes on the equirectangular grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutClassMap {
    width: usize,
    height: usize,
    classes: Vec<LayoutClass>,
}

impl LayoutClassMap {
    pub fn filled(width: usize, height: usize, class: LayoutClass) -> Result<Self> {
        if width < 2 || height < 1 {
            return Err(Error::Domain(format!(
                "class map {width}x{height} is too small"
            )));
        }
        Ok(Self {
            width,
            height,
            classes: vec![class; width * height],
        })
    }

    pub fn from_classes(width: usize, height: usize, classes: Vec<LayoutClass>) -> Result<Self> {
        let mut map = Self::filled(width, height, LayoutClass::NotLayout)?;
        if classes.len() != width * height {
            return Err(Error::Domain(format!(
                "class map {width}x{height} needs {} entries, got {}",
                width * height,
                classes.len()
            )));
        }
        map.classes = classes;
        Ok(map)
    }

    /// Builds a map from raw ids; any id above 3 is rejected.
    pub fn from_ids(width: usize, height: usize, ids: &[u8]) -> Result<Self> {
        let classes = ids
            .iter()
            .map(|&id| {
                LayoutClass::from_id(id)
                    .ok_or_else(|| Error::Domain(format!("layout class id {id} is not in 0..=3")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_classes(width, height, classes)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> LayoutClass {
        self.classes[v * self.width + u % self.width]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, class: LayoutClass) {
        let w = self.width;
        self.classes[v * w + u % w] = class;
    }

    pub fn classes(&self) -> &[LayoutClass] {
        &self.classes
    }

    pub fn ids(&self) -> Vec<u8> {
        self.classes.iter().map(|c| c.id()).collect()
    }

    pub fn count(&self, class: LayoutClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    pub fn roll_columns(&self, offset: isize) -> Self {
        let w = self.width as isize;
        let mut out = self.clone();
        for v in 0..self.height {
            for u in 0..self.width {
                let src = (u as isize - offset).rem_euclid(w) as usize;
                out.set(u, v, self.get(src, v));
            }
        }
        out
    }

    pub fn flip_columns(&self) -> Self {
        let mut out = self.clone();
        for v in 0..self.height {
            for u in 0..self.width {
                out.set(u, v, self.get(self.width - 1 - u, v));
            }
        }
        out
    }
}

/// Fine-grained semantic label ids on the equirectangular grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    ids: Vec<u32>,
}

impl LabelMap {
    pub fn new(width: usize, height: usize, ids: Vec<u32>) -> Result<Self> {
        if width < 2 || height < 1 || ids.len() != width * height {
            return Err(Error::Domain(format!(
                "label map {width}x{height} with {} ids is malformed",
                ids.len()
            )));
        }
        Ok(Self { width, height, ids })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }
}

/// Semantic id to layout class lookup table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassMapping {
    table: BTreeMap<u32, LayoutClass>,
}

impl ClassMapping {
    pub fn new() -> Self {
        Self::default()
    }

    /// Maps ids 0..=3 onto themselves, for maps that are already 4-class.
    pub fn identity() -> Self {
        let mut m = Self::new();
        for c in LayoutClass::ALL {
            m.insert(c.id() as u32, c);
        }
        m
    }

    pub fn insert(&mut self, id: u32, class: LayoutClass) -> &mut Self {
        self.table.insert(id, class);
        self
    }

    pub fn get(&self, id: u32) -> Option<LayoutClass> {
        self.table.get(&id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, LayoutClass)> + '_ {
        self.table.iter().map(|(&k, &v)| (k, v))
    }
}

/// Pixel-wise lookup of semantic ids into the 4-class layout problem.
pub fn map_to_layout_classes(labels: &LabelMap, mapping: &ClassMapping) -> Result<LayoutClassMap> {
    let classes = labels
        .ids
        .iter()
        .map(|&id| mapping.get(id).ok_or(Error::UnmappedLabel(id)))
        .collect::<Result<Vec<_>>>()?;
    LayoutClassMap::from_classes(labels.width, labels.height, classes)
}

/// Per-pixel class probabilities in class-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct UnaryField {
    width: usize,
    height: usize,
    probs: Vec<[f64; 4]>,
}

impl UnaryField {
    pub fn from_probs(width: usize, height: usize, probs: Vec<[f64; 4]>) -> Result<Self> {
        if probs.len() != width * height {
            return Err(Error::Domain(format!(
                "unary field {width}x{height} needs {} entries, got {}",
                width * height,
                probs.len()
            )));
        }
        for p in &probs {
            let sum: f64 = p.iter().sum();
            if p.iter().any(|&x| !(0.0..=1.0).contains(&x)) || (sum - 1.0).abs() > 1e-6 {
                return Err(Error::Domain(format!("unary {p:?} is not a distribution")));
            }
        }
        Ok(Self {
            width,
            height,
            probs,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn probs(&self) -> &[[f64; 4]] {
        &self.probs
    }

    pub fn same_shape(&self, other: (usize, usize)) -> Result<()> {
        check_shape(self.dims(), other)
    }
}

/// Confident unary on known layout classes, uniform on `NotLayout`.
///
/// A known pixel gets `confidence` on its class and `(1 − confidence)/3` on
/// each of the other three.
pub fn build_unary(layout: &LayoutClassMap, confidence: f64) -> Result<UnaryField> {
    if !(confidence > 0.25 && confidence < 1.0) {
        return Err(Error::Domain(format!(
            "unary confidence must lie in (0.25, 1), got {confidence}"
        )));
    }
    let rest = (1.0 - confidence) / 3.0;
    let probs = layout
        .classes
        .iter()
        .map(|&c| match c {
            LayoutClass::NotLayout => [0.25; 4],
            known => {
                let mut p = [rest; 4];
                p[known.id() as usize] = confidence;
                p
            }
        })
        .collect();
    Ok(UnaryField {
        width: layout.width,
        height: layout.height,
        probs,
    })
}
