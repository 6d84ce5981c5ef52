use emcurve::descent::{rank_ge_2_certificate, rank_ge_3_probe_with, ProbeOptions};
use emcurve::family::{self, FamilyParams};
use emcurve::finite_field::{count_points, reduce_curve};
use emcurve::harness::record::{
    build_record, recheck_line, VerifyOptions, DEFAULT_HEIGHT_BOUND, DEFAULT_REDUCTION_PRIMES,
};
use emcurve::torsion::torsion_report;
use emcurve::{Curve, Error, Point};
use num_bigint::BigInt;
use num_rational::BigRational;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyTuple;
use serde::Serialize;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io(msg) => PyOSError::new_err(msg),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_json<T: Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn rational_from_py(obj: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    let num: BigInt = obj.getattr("numerator")?.extract()?;
    let den: BigInt = obj.getattr("denominator")?.extract()?;
    if den == BigInt::from(0) {
        return Err(PyValueError::new_err("zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

fn rational_to_py<'py>(py: Python<'py>, q: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    let fraction = py.import("fractions")?.getattr("Fraction")?;
    fraction.call1((q.numer().clone(), q.denom().clone()))
}

/// `None` is the point at infinity; otherwise a pair `(x, y)` of ints or Fractions.
fn point_from_py(obj: &Bound<'_, PyAny>) -> PyResult<Point> {
    if obj.is_none() {
        return Ok(Point::Infinity);
    }
    let pair = obj
        .cast::<PyTuple>()
        .map_err(|_| PyValueError::new_err("point must be None or an (x, y) tuple"))?;
    if pair.len() != 2 {
        return Err(PyValueError::new_err(
            "point must be None or an (x, y) tuple",
        ));
    }
    Ok(Point::affine(
        rational_from_py(&pair.get_item(0)?)?,
        rational_from_py(&pair.get_item(1)?)?,
    ))
}

fn point_to_py<'py>(py: Python<'py>, pt: &Point) -> PyResult<Bound<'py, PyAny>> {
    match pt {
        Point::Infinity => Ok(py.None().into_bound(py)),
        Point::Affine { x, y } => {
            let pair = PyTuple::new(py, [rational_to_py(py, x)?, rational_to_py(py, y)?])?;
            Ok(pair.into_any())
        }
    }
}

/// Short Weierstrass curve y^2 = x^3 + b x + c over Q.
#[pyclass(name = "Curve", frozen, module = "emcurve")]
struct PyCurve {
    inner: Curve,
}

#[pymethods]
impl PyCurve {
    #[new]
    fn new(b: BigInt, c: BigInt) -> PyResult<Self> {
        Ok(Self {
            inner: Curve::new(b, c).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn b(&self) -> BigInt {
        self.inner.b().clone()
    }

    #[getter]
    fn c(&self) -> BigInt {
        self.inner.c().clone()
    }

    fn discriminant(&self) -> BigInt {
        self.inner.discriminant()
    }

    fn is_on_curve(&self, pt: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.inner.is_on_curve(&point_from_py(pt)?))
    }

    fn negate<'py>(&self, py: Python<'py>, pt: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let r = self.inner.negate(&point_from_py(pt)?).map_err(to_py_err)?;
        point_to_py(py, &r)
    }

    fn add<'py>(
        &self,
        py: Python<'py>,
        p: &Bound<'py, PyAny>,
        q: &Bound<'py, PyAny>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let r = self
            .inner
            .add(&point_from_py(p)?, &point_from_py(q)?)
            .map_err(to_py_err)?;
        point_to_py(py, &r)
    }

    fn double<'py>(&self, py: Python<'py>, pt: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let r = self.inner.double(&point_from_py(pt)?).map_err(to_py_err)?;
        point_to_py(py, &r)
    }

    fn scalar_mul<'py>(
        &self,
        py: Python<'py>,
        n: BigInt,
        pt: &Bound<'py, PyAny>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let r = self
            .inner
            .scalar_mul(&n, &point_from_py(pt)?)
            .map_err(to_py_err)?;
        point_to_py(py, &r)
    }

    /// Number of points on the reduction mod a prime of good reduction, including infinity.
    fn count_points(&self, ell: u64) -> PyResult<u64> {
        let rc = reduce_curve(&self.inner, ell).map_err(to_py_err)?;
        count_points(&rc).map_err(to_py_err)
    }

    #[pyo3(signature = (num_primes = DEFAULT_REDUCTION_PRIMES))]
    fn torsion_json(&self, num_primes: usize) -> PyResult<String> {
        to_json(&torsion_report(&self.inner, None, num_primes).map_err(to_py_err)?)
    }

    fn __repr__(&self) -> String {
        format!("Curve({})", self.inner)
    }
}

/// Parameters (m, p, q, r) of the family y^2 = x^3 - m^2 x + (pqr)^2.
#[pyclass(name = "FamilyParams", frozen, module = "emcurve")]
struct PyFamilyParams {
    inner: FamilyParams,
}

#[pymethods]
impl PyFamilyParams {
    #[new]
    fn new(m: u64, p: u64, q: u64, r: u64) -> PyResult<Self> {
        Ok(Self {
            inner: FamilyParams::new(m, p, q, r).map_err(to_py_err)?,
        })
    }

    #[getter]
    fn m(&self) -> u64 {
        self.inner.m
    }

    #[getter]
    fn primes(&self) -> (u64, u64, u64) {
        (self.inner.p, self.inner.q, self.inner.r)
    }

    fn curve(&self) -> PyResult<PyCurve> {
        Ok(PyCurve {
            inner: family::build_family_curve(&self.inner).map_err(to_py_err)?,
        })
    }

    /// Failed hypothesis names; empty when every hypothesis holds.
    fn hypothesis_failures(&self) -> Vec<&'static str> {
        family::validate_hypotheses(&self.inner).failures()
    }

    /// The points A = (m, pqr), B = (0, pqr) and S = A + B.
    fn canonical_points<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyTuple>> {
        let pts = family::canonical_points(&self.inner);
        PyTuple::new(
            py,
            [
                point_to_py(py, &pts.a)?,
                point_to_py(py, &pts.b)?,
                point_to_py(py, &pts.s)?,
            ],
        )
    }

    fn closed_form_double<'py>(
        &self,
        py: Python<'py>,
        pt: &Bound<'py, PyAny>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let pt = point_from_py(pt)?;
        let curve = family::build_family_curve(&self.inner).map_err(to_py_err)?;
        if !curve.is_on_curve(&pt) {
            return Err(to_py_err(Error::PointNotOnCurve));
        }
        point_to_py(py, &family::closed_form_double(&self.inner, &pt))
    }

    #[pyo3(signature = (num_primes = DEFAULT_REDUCTION_PRIMES))]
    fn torsion_json(&self, num_primes: usize) -> PyResult<String> {
        let curve = family::build_family_curve(&self.inner).map_err(to_py_err)?;
        to_json(&torsion_report(&curve, Some(&self.inner), num_primes).map_err(to_py_err)?)
    }

    #[pyo3(signature = (num_primes = DEFAULT_REDUCTION_PRIMES))]
    fn rank_certificate_json(&self, num_primes: usize) -> PyResult<String> {
        to_json(&rank_ge_2_certificate(&self.inner, num_primes).map_err(to_py_err)?)
    }

    #[pyo3(signature = (height_bound = DEFAULT_HEIGHT_BOUND, num_primes = DEFAULT_REDUCTION_PRIMES))]
    fn rank3_probe_json(&self, height_bound: u64, num_primes: usize) -> PyResult<String> {
        let base = rank_ge_2_certificate(&self.inner, num_primes).map_err(to_py_err)?;
        let options = ProbeOptions {
            height_bound,
            ..ProbeOptions::default()
        };
        to_json(&rank_ge_3_probe_with(base, options).map_err(to_py_err)?)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("FamilyParams(m={}, p={}, q={}, r={})", p.m, p.p, p.q, p.r)
    }
}

/// Full verification record for one parameter set, as a single JSON line.
#[pyfunction]
#[pyo3(signature = (m, p, q, r, height_bound = DEFAULT_HEIGHT_BOUND, reduction_primes = DEFAULT_REDUCTION_PRIMES))]
fn verify(
    m: u64,
    p: u64,
    q: u64,
    r: u64,
    height_bound: u64,
    reduction_primes: usize,
) -> PyResult<String> {
    let params = FamilyParams::new(m, p, q, r).map_err(to_py_err)?;
    let options = VerifyOptions {
        height_bound,
        reduction_primes,
        ..VerifyOptions::default()
    };
    Ok(build_record(&params, &options)
        .map_err(to_py_err)?
        .to_json_line())
}

/// Recompute a record line and return the names of fields that differ.
#[pyfunction]
fn recheck(line: &str) -> PyResult<Vec<String>> {
    Ok(recheck_line(line).map_err(to_py_err)?.mismatched_fields)
}

#[pymodule]
#[pyo3(name = "emcurve")]
fn emcurve_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurve>()?;
    m.add_class::<PyFamilyParams>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(recheck, m)?)?;
    Ok(())
}
