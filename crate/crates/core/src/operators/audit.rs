use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::RngCore;
use serde::Serialize;

use crate::schemes::{
    ClassicalScheme, Keypair, SchemeDescriptor, SchemeError, SchemeRef, SchemeWidths,
    TransformedScheme,
};

/// Counts which scheme functions an operator evaluated.
#[derive(Debug, Default)]
pub struct Audit {
    enc: AtomicU64,
    dec: AtomicU64,
    rec: AtomicU64,
    tdf: AtomicU64,
    tdf_inverse: AtomicU64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AuditSnapshot {
    pub enc: u64,
    pub dec: u64,
    pub rec: u64,
    pub tdf: u64,
    pub tdf_inverse: u64,
}

impl Audit {
    pub(crate) fn count_tdf(&self) {
        self.tdf.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn count_tdf_inverse(&self) {
        self.tdf_inverse.fetch_add(1, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> AuditSnapshot {
        AuditSnapshot {
            enc: self.enc.load(Ordering::Relaxed),
            dec: self.dec.load(Ordering::Relaxed),
            rec: self.rec.load(Ordering::Relaxed),
            tdf: self.tdf.load(Ordering::Relaxed),
            tdf_inverse: self.tdf_inverse.load(Ordering::Relaxed),
        }
    }
}

/// A scheme whose Enc, Dec and Rec calls are counted.
#[derive(Debug)]
pub(crate) struct Audited {
    inner: SchemeRef,
    audit: Arc<Audit>,
}

impl Audited {
    pub(crate) fn wrap(inner: SchemeRef, audit: Arc<Audit>) -> Arc<Self> {
        Arc::new(Self { inner, audit })
    }
}

impl ClassicalScheme for Audited {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn widths(&self) -> &SchemeWidths {
        self.inner.widths()
    }

    fn kgen(&self, rng: &mut dyn RngCore) -> Result<Keypair, SchemeError> {
        self.inner.kgen(rng)
    }

    fn enc(&self, pk: u64, m: u64, r: u64) -> u64 {
        self.audit.enc.fetch_add(1, Ordering::Relaxed);
        self.inner.enc(pk, m, r)
    }

    fn dec(&self, sk: u64, c: u64) -> u64 {
        self.audit.dec.fetch_add(1, Ordering::Relaxed);
        self.inner.dec(sk, c)
    }

    fn rec(&self, pk: u64, r: u64, c: u64) -> Option<u64> {
        self.audit.rec.fetch_add(1, Ordering::Relaxed);
        self.inner.rec(pk, r, c)
    }

    fn has_rec(&self) -> bool {
        self.inner.has_rec()
    }

    fn descriptor(&self) -> SchemeDescriptor {
        self.inner.descriptor()
    }

    fn as_any(&self) -> &dyn std::any::Any {
        self.inner.as_any()
    }

    fn as_transformed(&self) -> Option<&TransformedScheme> {
        self.inner.as_transformed()
    }
}
