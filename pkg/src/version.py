VERSION = "0.1.0"
LICENSE_NAME = "GNU GPL v3 or later"
