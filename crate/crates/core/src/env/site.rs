use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// A point of the square lattice Z².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Site {
    pub u: i64,
    pub v: i64,
}

pub const E1: Site = Site { u: 1, v: 0 };
pub const E2: Site = Site { u: 0, v: 1 };
pub const ORIGIN: Site = Site { u: 0, v: 0 };

impl Site {
    pub const fn new(u: i64, v: i64) -> Self {
        Site { u, v }
    }

    /// Anti-diagonal index `u + v`.
    #[inline]
    pub const fn level(self) -> i64 {
        self.u + self.v
    }

    /// Unit step `e_i` for `i ∈ {1, 2}`.
    #[inline]
    pub fn unit(i: usize) -> Site {
        match i {
            1 => E1,
            2 => E2,
            _ => panic!("unit step index must be 1 or 2, got {i}"),
        }
    }

    pub fn l1(self) -> i64 {
        self.u.abs() + self.v.abs()
    }

    pub fn dot(self, h: [f64; 2]) -> f64 {
        self.u as f64 * h[0] + self.v as f64 * h[1]
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

impl Add for Site {
    type Output = Site;
    fn add(self, o: Site) -> Site {
        Site::new(self.u + o.u, self.v + o.v)
    }
}

impl Sub for Site {
    type Output = Site;
    fn sub(self, o: Site) -> Site {
        Site::new(self.u - o.u, self.v - o.v)
    }
}

impl Neg for Site {
    type Output = Site;
    fn neg(self) -> Site {
        Site::new(-self.u, -self.v)
    }
}

/// Coordinatewise partial order: `x <= y` iff `x.u <= y.u` and `x.v <= y.v`.
impl PartialOrd for Site {
    fn partial_cmp(&self, other: &Site) -> Option<Ordering> {
        match (self.u.cmp(&other.u), self.v.cmp(&other.v)) {
            (a, b) if a == b => Some(a),
            (Ordering::Equal, b) => Some(b),
            (a, Ordering::Equal) => Some(a),
            _ => None,
        }
    }
}

/// A finite axis-aligned rectangle of sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub origin: Site,
    pub width: usize,
    pub height: usize,
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}–{}]", self.origin, self.corner())
    }
}

impl Window {
    pub fn new(origin: Site, width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param(format!(
                "window dimensions must be at least 1, got {width}×{height}"
            )));
        }
        Ok(Window { origin, width, height })
    }

    /// Window spanning `lo` to `hi` inclusive.
    pub fn spanning(lo: Site, hi: Site) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::param(format!("window corners {lo} and {hi} are not ordered")));
        }
        Window::new(lo, (hi.u - lo.u + 1) as usize, (hi.v - lo.v + 1) as usize)
    }

    /// Square window `[0, n-1]²`.
    pub fn square(n: usize) -> Self {
        Window::new(Site::new(0, 0), n, n).expect("square window of size 0")
    }

    /// Upper-right corner (inclusive).
    pub fn corner(&self) -> Site {
        Site::new(
            self.origin.u + self.width as i64 - 1,
            self.origin.v + self.height as i64 - 1,
        )
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn contains(&self, s: Site) -> bool {
        let du = s.u - self.origin.u;
        let dv = s.v - self.origin.v;
        du >= 0 && dv >= 0 && (du as usize) < self.width && (dv as usize) < self.height
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.contains(other.origin) && self.contains(other.corner())
    }

    #[inline]
    pub fn index(&self, s: Site) -> Option<usize> {
        if self.contains(s) {
            Some((s.v - self.origin.v) as usize * self.width + (s.u - self.origin.u) as usize)
        } else {
            None
        }
    }

    #[inline]
    pub fn site_at(&self, idx: usize) -> Site {
        Site::new(
            self.origin.u + (idx % self.width) as i64,
            self.origin.v + (idx / self.width) as i64,
        )
    }

    pub fn check(&self, s: Site) -> Result<usize> {
        self.index(s).ok_or_else(|| Error::OutOfWindow {
            site: s,
            window: self.to_string(),
        })
    }

    pub fn translate(&self, z: Site) -> Window {
        Window {
            origin: self.origin + z,
            ..*self
        }
    }

    pub fn intersect(&self, other: &Window) -> Option<Window> {
        let lo = Site::new(self.origin.u.max(other.origin.u), self.origin.v.max(other.origin.v));
        let a = self.corner();
        let b = other.corner();
        let hi = Site::new(a.u.min(b.u), a.v.min(b.v));
        Window::spanning(lo, hi).ok()
    }

    pub fn min_level(&self) -> i64 {
        self.origin.level()
    }

    pub fn max_level(&self) -> i64 {
        self.corner().level()
    }

    /// Sites of the window on level `k`, ordered by increasing `u`.
    pub fn level_sites(&self, k: i64) -> impl Iterator<Item = Site> {
        let c = self.corner();
        let lo = self.origin.u.max(k - c.v);
        let hi = c.u.min(k - self.origin.v);
        (lo..=hi).map(move |u| Site::new(u, k - u))
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.len()).map(move |i| self.site_at(i))
    }
}

/// Dense per-site storage over a window, row-major in `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    window: Window,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn filled(window: Window, value: T) -> Self {
        Grid {
            window,
            data: vec![value; window.len()],
        }
    }
}

impl<T> Grid<T> {
    pub fn from_fn(window: Window, mut f: impl FnMut(Site) -> T) -> Self {
        let data = (0..window.len()).map(|i| f(window.site_at(i))).collect();
        Grid { window, data }
    }

    pub(crate) fn from_vec(window: Window, data: Vec<T>) -> Self {
        assert_eq!(window.len(), data.len());
        Grid { window, data }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    #[inline]
    pub fn get(&self, s: Site) -> Option<&T> {
        self.window.index(s).map(|i| &self.data[i])
    }

    #[inline]
    pub fn get_mut(&mut self, s: Site) -> Option<&mut T> {
        self.window.index(s).map(move |i| &mut self.data[i])
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = (Site, &T)> {
        self.data
            .iter()
            .enumerate()
            .map(move |(i, x)| (self.window.site_at(i), x))
    }

    /// Same data, addressed through a translated window.
    pub(crate) fn retarget(self, window: Window) -> Self {
        assert_eq!(window.width, self.window.width);
        assert_eq!(window.height, self.window.height);
        Grid {
            window,
            data: self.data,
        }
    }
}

impl<T> std::ops::Index<Site> for Grid<T> {
    type Output = T;
    fn index(&self, s: Site) -> &T {
        match self.window.index(s) {
            Some(i) => &self.data[i],
            None => panic!("site {s} outside grid window {}", self.window),
        }
    }
}

impl<T> std::ops::IndexMut<Site> for Grid<T> {
    fn index_mut(&mut self, s: Site) -> &mut T {
        match self.window.index(s) {
            Some(i) => &mut self.data[i],
            None => panic!("site {s} outside grid window {}", self.window),
        }
    }
}
