import os
import sys
import subprocess


def install_requirements():
    subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])


if __name__ == "__main__":
    print("Setup started.")
    install_requirements()
    os.makedirs("data/sample", exist_ok=True)
    os.makedirs("output", exist_ok=True)
    print("Setup complete. You can proceed now.")
