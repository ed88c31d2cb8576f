//! Python bindings: a `Matroid` class over the core rank oracles plus the
//! procedures and census commands. Structured results come back as plain
//! Python objects decoded from their JSON form.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use linemin_core::certificate::{verify_certificate, WitnessCertificate};
use linemin_core::geometry::{is_projective_geometry, pg, theta, PgVerdict};
use linemin_core::harness::catalog::{named_matroid, Catalog, CatalogSpec};
use linemin_core::harness::census::{check_kung_bound, density_profile, extremal_census, CensusOptions, CensusReport};
use linemin_core::harness::HarnessError;
use linemin_core::mask::SubsetMask;
use linemin_core::matrix_io::{format_matrix, parse_matrix};
use linemin_core::matroid::{self as core, AnyMatroid, Matroid as _, MatroidSpec, PointIndex, UniformMatroid};
use linemin_core::minors::{has_u2n_minor, max_line_minor, MinorAnswer, MinorSearchBudget};
use linemin_core::procedures::{self as procs, rational_str, DensityTarget, GrowthPolicy};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn set(items: Vec<usize>) -> SubsetMask {
    items.into_iter().collect()
}

fn from_json<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn budget(nodes: Option<u64>) -> MinorSearchBudget {
    nodes.map(MinorSearchBudget::with_nodes).unwrap_or_default()
}

/// A matroid given by a rank oracle on ground set `0..size`.
#[pyclass(name = "Matroid", module = "linemin", frozen)]
struct PyMatroid {
    inner: Arc<AnyMatroid>,
}

impl PyMatroid {
    fn wrap(m: AnyMatroid) -> Self {
        PyMatroid { inner: Arc::new(m) }
    }
}

#[pymethods]
impl PyMatroid {
    /// The projective geometry PG(n-1, q).
    #[staticmethod]
    fn pg(n: u32, q: u64) -> PyResult<Self> {
        Ok(Self::wrap(pg(n, q).map_err(value_err)?.into()))
    }

    #[staticmethod]
    fn uniform(rank: usize, size: usize) -> PyResult<Self> {
        Ok(Self::wrap(UniformMatroid::new(rank, size).map_err(value_err)?.into()))
    }

    /// A named instance such as `fano`, `fano-plus-point`, `pg4q2` or `u2,6`.
    #[staticmethod]
    fn named(name: &str) -> PyResult<Self> {
        Ok(Self::wrap(named_matroid(name).map_err(value_err)?))
    }

    /// Parses the plain-text matrix format `q r n` followed by `r` rows.
    #[staticmethod]
    fn from_matrix(text: &str) -> PyResult<Self> {
        Ok(Self::wrap(parse_matrix(text).map_err(value_err)?.into()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let spec: MatroidSpec = serde_json::from_str(text).map_err(value_err)?;
        Ok(Self::wrap(spec.build().map_err(value_err)?))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_spec()).expect("specs serialize")
    }

    /// The matrix text, for linear matroids only.
    fn to_matrix(&self) -> PyResult<String> {
        self.inner
            .as_linear()
            .map(format_matrix)
            .ok_or_else(|| PyValueError::new_err("not a linear matroid"))
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.ground_size()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.full_rank()
    }

    fn rank_of(&self, items: Vec<usize>) -> PyResult<usize> {
        let s = set(items);
        core::check_subset(&*self.inner, &s).map_err(value_err)?;
        Ok(self.inner.rank(&s))
    }

    fn closure(&self, items: Vec<usize>) -> PyResult<Vec<usize>> {
        Ok(core::closure(&*self.inner, &set(items)).map_err(value_err)?.to_vec())
    }

    fn epsilon(&self) -> usize {
        PointIndex::new(&*self.inner).count()
    }

    fn is_simple(&self) -> bool {
        core::is_simple(&*self.inner)
    }

    /// Parallel classes of non-loops.
    fn points(&self) -> Vec<Vec<usize>> {
        core::points(&*self.inner).iter().map(SubsetMask::to_vec).collect()
    }

    #[pyo3(signature = (min_points = 3))]
    fn lines(&self, min_points: usize) -> Vec<Vec<usize>> {
        core::lines(&*self.inner, min_points).iter().map(SubsetMask::to_vec).collect()
    }

    fn flats(&self, rank: usize) -> PyResult<Vec<Vec<usize>>> {
        Ok(core::flats_of_rank(&*self.inner, rank).map_err(value_err)?.iter().map(SubsetMask::to_vec).collect())
    }

    fn is_round(&self) -> PyResult<bool> {
        Ok(core::is_round(&*self.inner).map_err(value_err)?.is_round())
    }

    fn connectivity(&self, a: Vec<usize>, b: Vec<usize>) -> PyResult<usize> {
        core::local_connectivity(&*self.inner, &set(a), &set(b)).map_err(value_err)
    }

    fn contract(&self, items: Vec<usize>) -> PyResult<Self> {
        let m = AnyMatroid::minor(self.inner.clone(), set(items), SubsetMask::new()).map_err(value_err)?;
        Ok(Self::wrap(m))
    }

    fn delete(&self, items: Vec<usize>) -> PyResult<Self> {
        let m = AnyMatroid::minor(self.inner.clone(), SubsetMask::new(), set(items)).map_err(value_err)?;
        Ok(Self::wrap(m))
    }

    fn restrict(&self, items: Vec<usize>) -> PyResult<Self> {
        Ok(Self::wrap(AnyMatroid::restriction(self.inner.clone(), set(items)).map_err(value_err)?))
    }

    fn direct_sum(&self, other: &PyMatroid) -> PyResult<Self> {
        let m = AnyMatroid::direct_sum((*self.inner).clone(), (*other.inner).clone()).map_err(value_err)?;
        Ok(Self::wrap(m))
    }

    /// `{"points", "exact", "nodes", "certificate"}`.
    #[pyo3(signature = (budget = None))]
    fn max_line_minor<'py>(&self, py: Python<'py>, budget: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let found = max_line_minor(&*self.inner, self::budget(budget)).map_err(value_err)?;
        from_json(
            py,
            &serde_json::json!({
                "points": found.points,
                "exact": found.exact,
                "nodes": found.nodes,
                "certificate": found.certificate,
            }),
        )
    }

    /// True, False, or None when the budget ran out.
    #[pyo3(signature = (n, budget = None))]
    fn has_u2n_minor(&self, n: usize, budget: Option<u64>) -> PyResult<Option<bool>> {
        Ok(match has_u2n_minor(&*self.inner, n, self::budget(budget)).map_err(value_err)? {
            MinorAnswer::Present(_) => Some(true),
            MinorAnswer::Absent => Some(false),
            MinorAnswer::Unknown { .. } => None,
        })
    }

    /// The order q when this is a projective geometry or plane, else None.
    fn projective_order(&self) -> PyResult<Option<u64>> {
        Ok(match is_projective_geometry(&*self.inner).map_err(value_err)? {
            PgVerdict::Violation(_) => None,
            v => v.order(),
        })
    }

    /// Replays a certificate given as JSON.
    fn verify(&self, certificate: &str) -> PyResult<bool> {
        let c: WitnessCertificate = serde_json::from_str(certificate).map_err(value_err)?;
        verify_certificate(&c, &*self.inner).map_err(value_err)
    }

    fn skew_dense_subset(&self, a: Vec<usize>, b: Vec<usize>, lambda: &str, q: u64, l: u64, k: usize) -> PyResult<Vec<usize>> {
        let lambda = rational_str::parse(lambda).map_err(PyValueError::new_err)?;
        let target = DensityTarget::new(lambda, q, l, k).map_err(value_err)?;
        Ok(procs::skew_dense_subset(&*self.inner, &set(a), &set(b), &target).map_err(value_err)?.to_vec())
    }

    /// Growth values `f(1), f(2), ...` as integers or `"n/d"` strings.
    fn round_restriction(&self, policy: Vec<String>) -> PyResult<Vec<usize>> {
        let table = policy.iter().map(|s| rational_str::parse(s)).collect::<Result<Vec<_>, _>>().map_err(PyValueError::new_err)?;
        let policy = GrowthPolicy::from_table(table).map_err(value_err)?;
        Ok(procs::round_restriction(&*self.inner, &policy).map_err(value_err)?.to_vec())
    }

    fn round_dense_restriction<'py>(&self, py: Python<'py>, q: u64, t: usize) -> PyResult<Bound<'py, PyAny>> {
        from_json(py, &procs::round_dense_restriction(&*self.inner, q, t).map_err(value_err)?)
    }

    fn line_from_line_and_plane<'py>(
        &self,
        py: Python<'py>,
        line: Vec<usize>,
        plane: Vec<usize>,
        q: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        from_json(py, &procs::line_from_line_and_plane(&*self.inner, &set(line), &set(plane), q).map_err(value_err)?)
    }

    fn __repr__(&self) -> String {
        format!("Matroid(size={}, rank={})", self.inner.ground_size(), self.inner.full_rank())
    }
}

#[pyfunction]
#[pyo3(name = "theta")]
fn py_theta(q: u64, r: u32) -> PyResult<u64> {
    theta(q, r).map_err(value_err)
}

#[pyfunction]
fn largest_prime_power_leq(l: u64) -> Option<u64> {
    procs::largest_prime_power_leq(l)
}

#[pyfunction]
fn gap_check(l: u64) -> bool {
    procs::gap_check(l)
}

type Census = fn(&Catalog, u64, &CensusOptions) -> Result<CensusReport, HarnessError>;

fn census<'py>(py: Python<'py>, run: Census, catalog: &str, l: u64, budget: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let spec: CatalogSpec = catalog.parse().map_err(value_err)?;
    let cat = Catalog::generate(catalog, &spec, false).map_err(value_err)?;
    let opts = CensusOptions { budget: self::budget(budget), wall_time: false };
    let report = py.detach(|| run(&cat, l, &opts)).map_err(value_err)?;
    from_json(py, &report)
}

/// Kung's bound over a named catalog; returns the report.
#[pyfunction]
#[pyo3(signature = (catalog, l, budget = None))]
fn check_kung<'py>(py: Python<'py>, catalog: &str, l: u64, budget: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    census(py, check_kung_bound, catalog, l, budget)
}

#[pyfunction]
#[pyo3(name = "density_profile", signature = (catalog, l, budget = None))]
fn py_density_profile<'py>(py: Python<'py>, catalog: &str, l: u64, budget: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    census(py, density_profile, catalog, l, budget)
}

#[pyfunction]
#[pyo3(name = "extremal_census", signature = (catalog, l, budget = None))]
fn py_extremal_census<'py>(py: Python<'py>, catalog: &str, l: u64, budget: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    census(py, extremal_census, catalog, l, budget)
}

#[pymodule]
pub fn linemin(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatroid>()?;
    m.add_function(wrap_pyfunction!(py_theta, m)?)?;
    m.add_function(wrap_pyfunction!(largest_prime_power_leq, m)?)?;
    m.add_function(wrap_pyfunction!(gap_check, m)?)?;
    m.add_function(wrap_pyfunction!(check_kung, m)?)?;
    m.add_function(wrap_pyfunction!(py_density_profile, m)?)?;
    m.add_function(wrap_pyfunction!(py_extremal_census, m)?)?;
    Ok(())
}
