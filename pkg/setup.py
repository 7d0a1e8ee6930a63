#!/usr/bin/env python3
"""
Sanitizer Setup Script
Creates the virtual environment, installs dependencies and prepares the runs directory.
"""

import os
import sys
import subprocess
import platform
from dotenv import load_dotenv
load_dotenv()


def run_command(command, description):
    """Run a command and handle errors"""
    print(f"{description}...")
    try:
        subprocess.run(command, shell=True, check=True, capture_output=True, text=True)
        print(f"{description} completed successfully")
        return True
    except subprocess.CalledProcessError as e:
        print(f"{description} failed: {e}")
        print(f"Error output: {e.stderr}")
        return False


def check_python_version():
    """Check if Python version is compatible"""
    version = sys.version_info
    if version.major < 3 or (version.major == 3 and version.minor < 10):
        print("Python 3.10 or higher is required")
        print(f"Current version: {version.major}.{version.minor}.{version.micro}")
        return False
    print(f"Python version {version.major}.{version.minor}.{version.micro} is compatible")
    return True


def venv_tool(name):
    if platform.system() == "Windows":
        path = os.path.join("venv", "Scripts", f"{name}.exe")
        if not os.path.exists(path):
            path = os.path.join("venv", "Scripts", name)
        return path
    return os.path.join("venv", "bin", name)


def create_virtual_environment():
    """Create virtual environment"""
    if os.path.exists("venv"):
        print("Virtual environment already exists")
        return True
    return run_command(f'"{sys.executable}" -m venv venv', "Creating virtual environment")


def install_dependencies():
    """Install project dependencies"""
    pip_path = venv_tool("pip")
    if not os.path.exists(pip_path):
        print("pip not found in virtual environment")
        print(f"   Looked for: {pip_path}")
        print("   Try recreating the virtual environment with: python -m venv venv")
        return False
    return run_command(f'"{pip_path}" install -r requirements.txt', "Installing dependencies")


def create_runs_directory():
    """Create the runs directory named by SANITIZER_RUNS_DIR"""
    runs_dir = os.getenv("SANITIZER_RUNS_DIR", "runs")
    if not os.path.exists(runs_dir):
        os.makedirs(runs_dir)
        print(f"Created {runs_dir} directory")
    else:
        print(f"{runs_dir} directory already exists")
    return True


def run_tests():
    """Run the test suite inside the virtual environment"""
    return run_command(f'"{venv_tool("python")}" -m pytest -q', "Running tests")


def main():
    """Main setup function"""
    import argparse

    parser = argparse.ArgumentParser(
        description="Sanitizer Setup",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python setup.py               # Basic setup
  python setup.py --with-tests  # Setup, then run the test suite
        """
    )
    parser.add_argument(
        '--with-tests',
        action='store_true',
        help='Run the test suite after installing dependencies'
    )
    args = parser.parse_args()

    print("Sanitizer Setup")
    print("=" * 40)

    if not check_python_version():
        sys.exit(1)
    if not create_virtual_environment():
        sys.exit(1)
    if not install_dependencies():
        sys.exit(1)
    if not create_runs_directory():
        sys.exit(1)

    if args.with_tests and not run_tests():
        print("Setup completed, but the test suite failed")
        sys.exit(1)

    print("\nSetup completed successfully!")
    print("\nNext steps:")
    print("1. Activate the virtual environment:")
    if platform.system() == "Windows":
        print("   venv\\Scripts\\activate")
    else:
        print("   source venv/bin/activate")
    print("2. Run the demo pipeline:")
    print("   ./run.sh")
    print("3. Or call a single command:")
    print("   python main.py --help")


if __name__ == "__main__":
    main()
