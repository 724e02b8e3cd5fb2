//! Name-keyed registries for interchangeable strategies.
//!
//! Every strategy family in the crate (product backends, time-stepping
//! schemes, noise models, initial-data families, verification suites) is a
//! trait object registered under a unique name and looked up at runtime from
//! configuration.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Arc<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, item: Arc<T>) -> Result<()> {
        let name = item.name();
        if self.entries.contains_key(name) {
            return Err(Error::InvalidParameter(format!(
                "{} `{}` already registered",
                self.kind, name
            )));
        }
        self.entries.insert(name, item);
        Ok(())
    }

    pub fn with(mut self, item: Arc<T>) -> Self {
        self.register(item).expect("duplicate builtin registration");
        self
    }

    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Unknown {
                kind: self.kind,
                name: name.to_string(),
            })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Named {
        fn greet(&self) -> String;
    }
    struct Hello;
    impl Named for Hello {
        fn name(&self) -> &'static str {
            "hello"
        }
    }
    impl Greeter for Hello {
        fn greet(&self) -> String {
            "hi".into()
        }
    }

    #[test]
    fn lookup_and_duplicates() {
        let mut reg: Registry<dyn Greeter> = Registry::new("greeter");
        reg.register(Arc::new(Hello)).unwrap();
        assert_eq!(reg.get("hello").unwrap().greet(), "hi");
        assert!(reg.register(Arc::new(Hello)).is_err());
        match reg.get("nope") {
            Err(Error::Unknown { kind, name }) => {
                assert_eq!(kind, "greeter");
                assert_eq!(name, "nope");
            }
            other => panic!("unexpected {:?}", other.map(|_| ())),
        }
        assert_eq!(reg.names(), vec!["hello"]);
    }
}
