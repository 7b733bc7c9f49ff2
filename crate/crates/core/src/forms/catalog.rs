//! The two counted families and the normal forms of non-normal cubics over Q.

use std::fmt;

use crate::error::{Error, Result};
use crate::exactarith::is_squarefree;

use super::CubicForm;

/// Which hypersurface a computation refers to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceKind {
    /// `t0 t1 t2 + t3 (t0^2 + a t1^2) = 0` in `P^3`, `a` nonzero squarefree.
    Cayley { a: i64 },
    /// `t0^2 t2 + t1^2 t3 + t0 t1 t4 = 0` in `P^4`.
    Threefold,
    /// A normal-form catalog entry; constructible, not countable.
    CatalogOnly { tag: String, params: Vec<i64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceSpec {
    kind: SurfaceKind,
    ambient_dim: usize,
}

impl SurfaceSpec {
    pub fn cayley(a: i64) -> Result<Self> {
        check_cayley_parameter(a)?;
        Ok(SurfaceSpec {
            kind: SurfaceKind::Cayley { a },
            ambient_dim: 3,
        })
    }

    pub fn threefold() -> Self {
        SurfaceSpec {
            kind: SurfaceKind::Threefold,
            ambient_dim: 4,
        }
    }

    pub fn catalog(tag: &str, params: &[i64]) -> Result<Self> {
        let entry = normal_form_catalog()
            .into_iter()
            .find(|e| e.tag == tag)
            .ok_or_else(|| Error::domain(format!("unknown catalog tag {tag:?}")))?;
        // validates the parameter count and constraints
        (entry.build)(params)?;
        Ok(SurfaceSpec {
            kind: SurfaceKind::CatalogOnly {
                tag: tag.to_string(),
                params: params.to_vec(),
            },
            ambient_dim: entry.ambient_dim,
        })
    }

    pub fn kind(&self) -> &SurfaceKind {
        &self.kind
    }

    /// `n` for a hypersurface in `P^n`.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn num_vars(&self) -> usize {
        self.ambient_dim + 1
    }

    pub fn cayley_parameter(&self) -> Option<i64> {
        match self.kind {
            SurfaceKind::Cayley { a } => Some(a),
            _ => None,
        }
    }

    /// `"cayley"`, `"threefold"` or `"catalog"`.
    pub fn label(&self) -> &'static str {
        match self.kind {
            SurfaceKind::Cayley { .. } => "cayley",
            SurfaceKind::Threefold => "threefold",
            SurfaceKind::CatalogOnly { .. } => "catalog",
        }
    }
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SurfaceKind::Cayley { a } => write!(f, "cayley(a={a})"),
            SurfaceKind::Threefold => write!(f, "threefold"),
            SurfaceKind::CatalogOnly { tag, params } => write!(f, "catalog({tag}; {params:?})"),
        }
    }
}

fn check_cayley_parameter(a: i64) -> Result<()> {
    if a == 0 {
        return Err(Error::domain("a must be nonzero"));
    }
    if !is_squarefree(a)? {
        return Err(Error::domain(format!("a must be squarefree, got {a}")));
    }
    Ok(())
}

fn cayley_form(a: i64) -> Result<CubicForm> {
    CubicForm::from_products(4, &[(1, [0, 1, 2]), (1, [0, 0, 3]), (a, [1, 1, 3])])
}

fn threefold_form() -> Result<CubicForm> {
    CubicForm::from_products(5, &[(1, [0, 0, 2]), (1, [1, 1, 3]), (1, [0, 1, 4])])
}

/// `t0^2 t2 + t0 t1 t3 + t1^2 t4`: the threefold with `t3` and `t4` swapped.
/// The automorphism formulas and the Segre-scroll projection are written in
/// these coordinates.
pub fn threefold_normal_form() -> CubicForm {
    CubicForm::from_products(5, &[(1, [0, 0, 2]), (1, [0, 1, 3]), (1, [1, 1, 4])])
        .expect("static form is well formed")
}

/// The defining cubic with integer coefficients.
pub fn surface_form(spec: &SurfaceSpec) -> Result<CubicForm> {
    match &spec.kind {
        SurfaceKind::Cayley { a } => {
            check_cayley_parameter(*a)?;
            cayley_form(*a)
        }
        SurfaceKind::Threefold => threefold_form(),
        SurfaceKind::CatalogOnly { tag, params } => {
            let entry = normal_form_catalog()
                .into_iter()
                .find(|e| e.tag == tag)
                .ok_or_else(|| Error::domain(format!("unknown catalog tag {tag:?}")))?;
            (entry.build)(params)
        }
    }
}

/// One family of the classification of geometrically integral,
/// geometrically non-normal cubic hypersurfaces that are not cones.
#[derive(Clone, Copy)]
pub struct CatalogEntry {
    pub tag: &'static str,
    /// `n` for `P^n`.
    pub ambient_dim: usize,
    pub params: &'static [&'static str],
    pub constraint: &'static str,
    pub build: fn(&[i64]) -> Result<CubicForm>,
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("tag", &self.tag)
            .field("ambient_dim", &self.ambient_dim)
            .field("params", &self.params)
            .field("constraint", &self.constraint)
            .finish()
    }
}

fn arity(params: &[i64], n: usize, tag: &str) -> Result<()> {
    if params.len() != n {
        return Err(Error::domain(format!(
            "{tag} takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

fn build_conic_bundle(p: &[i64]) -> Result<CubicForm> {
    arity(p, 3, "(t0^2+a t1^2)t2+t1^2(b t0+c t1)")?;
    let (a, b, c) = (p[0], p[1], p[2]);
    CubicForm::from_products(
        3,
        &[(1, [0, 0, 2]), (a, [1, 1, 2]), (b, [0, 1, 1]), (c, [1, 1, 1])],
    )
}

fn build_nodal_plane(p: &[i64]) -> Result<CubicForm> {
    arity(p, 1, "t0t1t2+t0^3+a t1^3")?;
    CubicForm::from_products(3, &[(1, [0, 1, 2]), (1, [0, 0, 0]), (p[0], [1, 1, 1])])
}

fn build_split_surface(p: &[i64]) -> Result<CubicForm> {
    arity(p, 0, "t0^2t2+t1^2t3")?;
    CubicForm::from_products(4, &[(1, [0, 0, 2]), (1, [1, 1, 3])])
}

fn build_cayley_family(p: &[i64]) -> Result<CubicForm> {
    arity(p, 1, "t0t1t2+t3(t0^2+a t1^2)")?;
    let a = p[0];
    if a == 1 {
        return Err(Error::domain("a = 1 is excluded from this normal form"));
    }
    check_cayley_parameter(a)?;
    cayley_form(a)
}

fn build_cayley_ruled(p: &[i64]) -> Result<CubicForm> {
    arity(p, 0, "t0t1t2+t3t0^2+t1^3")?;
    CubicForm::from_products(4, &[(1, [0, 1, 2]), (1, [0, 0, 3]), (1, [1, 1, 1])])
}

fn build_threefold(p: &[i64]) -> Result<CubicForm> {
    arity(p, 0, "t0^2t2+t0t1t3+t1^2t4")?;
    Ok(threefold_normal_form())
}

/// The six normal forms, in the order they are usually listed.
pub fn normal_form_catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            tag: "(t0^2+a t1^2)t2+t1^2(b t0+c t1)",
            ambient_dim: 2,
            params: &["a", "b", "c"],
            constraint: "a, b, c in Z",
            build: build_conic_bundle,
        },
        CatalogEntry {
            tag: "t0t1t2+t0^3+a t1^3",
            ambient_dim: 2,
            params: &["a"],
            constraint: "a in Z",
            build: build_nodal_plane,
        },
        CatalogEntry {
            tag: "t0^2t2+t1^2t3",
            ambient_dim: 3,
            params: &[],
            constraint: "",
            build: build_split_surface,
        },
        CatalogEntry {
            tag: "t0t1t2+t3(t0^2+a t1^2)",
            ambient_dim: 3,
            params: &["a"],
            constraint: "a in Z \\ {0, 1}, squarefree",
            build: build_cayley_family,
        },
        CatalogEntry {
            tag: "t0t1t2+t3t0^2+t1^3",
            ambient_dim: 3,
            params: &[],
            constraint: "",
            build: build_cayley_ruled,
        },
        CatalogEntry {
            tag: "t0^2t2+t0t1t3+t1^2t4",
            ambient_dim: 4,
            params: &[],
            constraint: "",
            build: build_threefold,
        },
    ]
}
