//! Shared component instances handed to one virtual system at a time.

use std::sync::{Arc, Condvar, Mutex, MutexGuard};

struct Slot<T> {
    value: Arc<T>,
    owner: Option<String>,
}

/// A fixed set of interchangeable component instances.
pub struct ComponentPool<T> {
    name: &'static str,
    slots: Mutex<Vec<Slot<T>>>,
    freed: Condvar,
}

impl<T> ComponentPool<T> {
    pub fn new(name: &'static str, instances: Vec<Arc<T>>) -> Arc<Self> {
        assert!(!instances.is_empty(), "component pool {name} needs an instance");
        let slots = instances.into_iter().map(|value| Slot { value, owner: None }).collect();
        Arc::new(ComponentPool { name, slots: Mutex::new(slots), freed: Condvar::new() })
    }

    fn lock(&self) -> MutexGuard<'_, Vec<Slot<T>>> {
        self.slots.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// Blocks until an instance is free and hands it to `owner`.
    pub fn acquire(self: &Arc<Self>, owner: &str) -> Lease<T> {
        let mut slots = self.lock();
        loop {
            if let Some(i) = slots.iter().position(|s| s.owner.is_none()) {
                slots[i].owner = Some(owner.to_string());
                return Lease { pool: Arc::clone(self), index: i, value: Arc::clone(&slots[i].value) };
            }
            slots = self.freed.wait(slots).unwrap_or_else(|e| e.into_inner());
        }
    }

    /// Current owners, one entry per instance.
    pub fn owners(&self) -> Vec<Option<String>> {
        self.lock().iter().map(|s| s.owner.clone()).collect()
    }
}

/// Exclusive use of one component instance; returned to the pool on drop.
pub struct Lease<T> {
    pool: Arc<ComponentPool<T>>,
    index: usize,
    value: Arc<T>,
}

impl<T> std::ops::Deref for Lease<T> {
    type Target = T;

    fn deref(&self) -> &T {
        &self.value
    }
}

impl<T> Drop for Lease<T> {
    fn drop(&mut self) {
        let mut slots = self.pool.lock();
        slots[self.index].owner = None;
        drop(slots);
        self.pool.freed.notify_one();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serial_sharing_and_ownership() {
        let pool = ComponentPool::new("gen", vec![Arc::new(5)]);
        {
            let a = pool.acquire("vs1");
            assert_eq!(*a, 5);
            assert_eq!(pool.owners(), vec![Some("vs1".to_string())]);
        }
        assert_eq!(pool.owners(), vec![None]);
        let b = pool.acquire("vs2");
        assert_eq!(*b, 5);
    }

    #[test]
    fn blocked_acquire_resumes_after_drop() {
        let pool = ComponentPool::new("gen", vec![Arc::new(1)]);
        let first = pool.acquire("vs1");
        let p = Arc::clone(&pool);
        let t = std::thread::spawn(move || *p.acquire("vs2"));
        std::thread::sleep(std::time::Duration::from_millis(20));
        drop(first);
        assert_eq!(t.join().unwrap(), 1);
    }
}
